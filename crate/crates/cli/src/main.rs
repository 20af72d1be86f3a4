//! The `gwhf` binary: a thin clap dispatcher over the experiment drivers
//! in [`gwhf_cli::runs`].

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use gwhf_cli::runs::{
    self, Artifacts, ChaosArgs, SampleArgs, SpectrogramArgs, ValidateArgs, VarscanArgs, ZerosArgs,
};

#[derive(Parser)]
#[command(
    name = "gwhf",
    version,
    about = "Sampling, zero statistics, and exact chaos analysis of twisted-stationary \
             Gaussian fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one field realization on a grid and emit it as JSON.
    Sample(SampleArgs),
    /// Locate and charge the zeros of one realization.
    Zeros(ZerosArgs),
    /// Ensemble disk-count moments, dispersion intervals, and growth fits.
    Varscan(VarscanArgs),
    /// Exact chaos projection report with the dispersion verdict.
    Chaos(ChaosArgs),
    /// Landmark statistics of short-time Fourier transform fields.
    Spectrogram(SpectrogramArgs),
    /// Numerical admissibility checks for a kernel spec.
    ValidateKernel(ValidateArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(args) => {
            runs::run_sample(&args).and_then(|a| emit(a, args.out.as_deref(), false))
        }
        Command::Zeros(args) => {
            runs::run_zeros(&args).and_then(|a| emit(a, args.out.as_deref(), true))
        }
        Command::Varscan(args) => {
            runs::run_varscan(&args).and_then(|a| emit(a, args.out.as_deref(), false))
        }
        Command::Chaos(args) => {
            runs::run_chaos(&args).and_then(|a| emit(a, args.out.as_deref(), false))
        }
        Command::Spectrogram(args) => {
            runs::run_spectrogram(&args).and_then(|a| emit(a, args.out.as_deref(), false))
        }
        Command::ValidateKernel(args) => {
            runs::run_validate(&args).and_then(|a| emit(a, args.out.as_deref(), false))
        }
    };
    if let Err(err) = result {
        eprintln!("gwhf: {err}");
        std::process::exit(err.exit_code());
    }
}

/// Writes each artifact part to `<prefix>.<ext>`, or streams one part to
/// stdout when no prefix was given: the CSV for zero lists, the JSON
/// report otherwise.
fn emit(artifacts: Artifacts, out: Option<&Path>, csv_first: bool) -> gwhf_cli::Result<()> {
    match out {
        Some(prefix) => {
            let parts = [
                ("json", &artifacts.json),
                ("csv", &artifacts.csv),
                ("svg", &artifacts.svg),
            ];
            let mut written = Vec::new();
            for (ext, body) in parts {
                if let Some(body) = body {
                    let path = PathBuf::from(format!("{}.{ext}", prefix.display()));
                    std::fs::write(&path, body)?;
                    written.push(path.display().to_string());
                }
            }
            eprintln!("wrote {}", written.join(", "));
        }
        None => {
            let body = if csv_first {
                artifacts.csv.as_deref().or(artifacts.json.as_deref())
            } else {
                artifacts.json.as_deref().or(artifacts.csv.as_deref())
            };
            print!("{}", body.expect("every run yields an artifact"));
        }
    }
    Ok(())
}
