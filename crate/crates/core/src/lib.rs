//! Gaussian Weyl-Heisenberg fields on the complex plane.
//!
//! The crate splits into an exact layer and a floating-point layer. The
//! exact layer ([`polynomials`], the symbolic half of [`kernels`], and
//! [`chaos`]) works in arbitrary-precision rationals and produces kernel
//! derivatives, chaos coefficients, and the two-point second-chaos density
//! with no rounding at all. The floating-point layer ([`sampler`],
//! [`zeros`], [`statistics`]) draws field realizations from truncated
//! planar Gaussian series, locates and classifies their zeros, and turns
//! ensembles of counts into variance curves and growth exponents.

pub mod chaos;
pub mod kernels;
mod numeric;
pub mod polynomials;
pub mod sampler;
pub mod statistics;
pub mod zeros;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational literal `{0}` (expected `p` or `p/q`)")]
    ParseRational(String),
    #[error("invalid kernel spec `{spec}`: {reason}")]
    KernelSpec { spec: String, reason: String },
    #[error("exponential moment requires a positive rate, got {0}")]
    NonpositiveRate(String),
    #[error("profile must satisfy P(0) = 1, got P(0) = {0}")]
    NotNormalized(String),
    #[error("truncation {got} is inadequate for max sampled |z| = {radius:.3}; need at least {required} coefficients")]
    TruncationInadequate {
        got: usize,
        required: usize,
        radius: f64,
    },
    #[error("quadrature failed to converge: {0}")]
    QuadratureUnconverged(String),
    #[error("contour passes within {dist:.4} of a located zero (guard distance {guard:.4})")]
    ContourNearZero { dist: f64, guard: f64 },
    #[error("winding defect {defect:.3} exceeds 0.2; contour data too rough to trust")]
    ContourDefect { defect: f64 },
    #[error("analysis disk of radius {radius} does not fit the sampled window")]
    WindowTooSmall { radius: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
