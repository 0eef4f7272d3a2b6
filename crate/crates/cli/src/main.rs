//! `toeplitz`: finite-section experiments for Toeplitz operators with
//! harmonic symbols, driven by a JSON config.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "toeplitz", version, about = "Hardy/Bergman Toeplitz finite-section experiments")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` in the config
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cross-check every pseudospectrum node against a full Jacobi SVD (slow)
    #[arg(long, global = true)]
    svd_check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Hilbert-Schmidt difference: truncated sums, series and bound
    HsCheck,
    /// Section eigenvalues for every ladder rung (eigenvalues_N.csv)
    Spectrum,
    /// Smallest singular value on a grid (pseudospectrum.csv)
    Pseudospectrum,
    /// Full spectral report (report.json)
    Report,
    /// Sampled symbol curve and its diagnostics (curve.csv, curve.json)
    Curve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    BoundViolation,
    NonConvergence,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::BoundViolation => 2,
            Status::NonConvergence => 3,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Io(_) => 74,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<toeplitz_spectra::Error> for CliError {
    fn from(e: toeplitz_spectra::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let path = cli.config.ok_or_else(|| CliError::Usage("--config <PATH> is required".into()))?;
    let cfg = RunConfig::load(&path, cli.out.as_deref())?;
    match cli.command {
        Command::HsCheck => commands::hs_check(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Pseudospectrum => commands::pseudospectrum_cmd(&cfg, cli.svd_check),
        Command::Report => commands::report(&cfg),
        Command::Curve => commands::curve(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
