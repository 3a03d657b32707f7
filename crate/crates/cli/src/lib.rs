//! Command-line surface for `convbound`.
//!
//! [`run_cli`] parses arguments, runs one subcommand and returns the process
//! exit code: 0 on success, 1 for usage errors, 2 for invalid input and 3
//! when `verify` finds a violated property.

mod commands;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use convbound::network::NormMode;

pub use commands::ORACLE_CAP_ENV;

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::VerifyFailed => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Invalid(m) => f.write_str(m),
            CliError::VerifyFailed => f.write_str("one or more properties failed"),
        }
    }
}

pub(crate) fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Bounded,
}

impl From<ModeArg> for NormMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => NormMode::Exact,
            ModeArg::Bounded => NormMode::Bounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    UnitFrobenius,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArchArg {
    #[value(name = "mobilenet-v1")]
    MobilenetV1,
}

#[derive(Debug, Parser)]
#[command(
    name = "convbound",
    version,
    about = "Spectral norms and generalization bounds for convolutional networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the lowered matrix of one layer as CSV.
    Lower {
        bundle: PathBuf,
        /// 1-based layer index.
        #[arg(long)]
        layer: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-layer norm table.
    Norms {
        bundle: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Check every closed-form bound against dense oracles.
    Verify {
        bundle: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sensitive complexity of the network.
    Complexity {
        bundle: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Generalization bound: empirical ramp risk plus capacity and confidence terms.
    Bound {
        bundle: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long = "x-fnorm")]
        x_fnorm: f64,
        /// A bare number, or the summary CSV written by `margins`.
        #[arg(long = "risk-file")]
        risk_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Six bound families, ranked.
    Compare {
        bundle: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Evaluate every family at n = 1.
        #[arg(long = "ignore-n")]
        ignore_n: bool,
        /// Sample count; without it, n is ignored.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Margin distribution with empirical ramp and 0-1 risks.
    Margins {
        bundle: PathBuf,
        /// CSV with one input vector per row.
        #[arg(long)]
        data: PathBuf,
        /// One 1-based class label per line.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long = "per-example")]
        per_example: Option<PathBuf>,
    },
    /// Write a bundle with seeded random weights.
    Gen {
        #[arg(long, value_enum, conflicts_with = "spec", required_unless_present = "spec")]
        arch: Option<ArchArg>,
        /// JSON network description (`input_dim` and `layers`).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        width: f64,
        #[arg(long, default_value_t = 160)]
        resolution: usize,
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "unit-frobenius")]
        scale: ScaleArg,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Embed payloads as base64 in the manifest.
        #[arg(long)]
        inline: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the CLI on `args` (including the program name).
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match commands::dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
