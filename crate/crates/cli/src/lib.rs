//! Experiment orchestration for Gaussian Weyl-Heisenberg field statistics:
//! configuration plumbing, seeded ensemble runs across a worker pool, and
//! artifact emission (CSV tables, JSON reports, SVG charts).
//!
//! Every artifact embeds the resolved [`config::ExperimentConfig`] and the
//! crate version, and contains no timestamps or machine identifiers, so a
//! rerun with the same configuration reproduces every output byte for
//! byte.

pub mod chart;
pub mod config;
pub mod runs;

use std::fmt;

/// Errors split by exit code: configuration problems exit 2, numerical
/// failures exit 3, and I/O troubles exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
