//! `qel`: figure data, headline numbers and verification reports.
//!
//! Exit status: 0 success, 1 usage error, 2 failed verification, 3 input
//! outside the analysed regime.

mod cli;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::output::emit;

pub const THREADS_ENV: &str = "QEL_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Regime(String),
    VerificationFailed(Vec<String>),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::VerificationFailed(_) => 2,
            CliError::Regime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Regime(m) => write!(f, "invalid regime: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::VerificationFailed(names) => {
                writeln!(f, "verification failed ({} checks):", names.len())?;
                for n in names {
                    writeln!(f, "  {n}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<qel_core::Error> for CliError {
    fn from(e: qel_core::Error) -> Self {
        match e {
            qel_core::Error::InvalidRegime(_) => CliError::Regime(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = config::resolve(cli)?;
    let out_path = cfg.output.clone();
    let (output, verification) = match &cli.command {
        Command::InfoCurves(_) => (commands::info_curves(&cfg)?, None),
        Command::ErrorMap(_) => (commands::error_map(&cfg)?, None),
        Command::Bounds(_) => (commands::bounds(&cfg)?, None),
        Command::Crossover(_) => (commands::crossover(&cfg)?, None),
        Command::Verify(args) => {
            let (out, report) = commands::verify(&cfg, args)?;
            (out, Some(report))
        }
        Command::Coefficients(_) => (commands::coefficients(&cfg)?, None),
    };
    emit(&output.render(cfg.format)?, out_path.as_deref())?;
    match verification {
        Some(r) if !r.passed => Err(CliError::VerificationFailed(r.failures)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qel {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
