//! `hexset`: JSON in, JSON and CSV out.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or a
//! computation cannot be certified, and 2 on configuration errors. Errors are
//! reported as one JSON object on stderr.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hexset::level_set::Normalization;

use io::{CliResult, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "hexset",
    version,
    about = "Hilbert transforms of interval unions and exceptional-set constructions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// Input JSON file, or `-` for stdin.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory for the JSON report and CSV tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Kernel normalization: `pi` includes the 1/π factor, `bare` does not.
    #[arg(long, global = true, value_enum)]
    pub kernel_normalization: Option<Kernel>,
    /// Override the command's pass/fail tolerance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Corpus seed for `verify-all`.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Whitney depth, or number of construction stages.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kernel {
    Pi,
    Bare,
}

impl From<Kernel> for Normalization {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Pi => Normalization::Pi,
            Kernel::Bare => Normalization::Bare,
        }
    }
}

impl Flags {
    fn tolerance(&self, default: f64) -> CliResult<f64> {
        match self.tol {
            None => Ok(default),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(Failure::Config(format!("--tol must be positive, got {t}"))),
        }
    }

    fn normalization(&self, default: Normalization) -> Normalization {
        self.kernel_normalization.map_or(default, Into::into)
    }
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Full, truncated and maximal transforms at given points.
    Transform,
    /// Invert `{H1_E < μ}`: roots, E and the identity checks.
    Levelset,
    /// Exact level-set measures of `|H1_E|` against the Stein–Weiss formula.
    SteinWeiss,
    /// Whitney cells of an open set, with exact verification.
    Whitney,
    /// Nested construction with divergent truncated transforms of 1_E.
    ConstructThm1,
    /// Continuous compactly supported function with divergent truncations.
    ConstructThm2,
    /// Trigonometric polynomial with large partial sums on a given set.
    Kk,
    /// Run every identity over a seeded corpus and print one summary.
    VerifyAll,
}

fn run(cli: &Cli) -> CliResult<bool> {
    let artifacts = commands::dispatch(cli.command, &cli.flags)?;
    artifacts.emit(cli.flags.out.as_ref())?;
    Ok(artifacts.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let f = Failure::Config(e.render().to_string().trim().to_owned());
            eprintln!("{}", f.to_json());
            return ExitCode::from(f.exit_code());
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
