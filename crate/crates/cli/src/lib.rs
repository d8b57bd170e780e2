//! Experiment runners for the adiabatic oracle simulator.
//!
//! Each subcommand reads flags (optionally layered over a `key = value`
//! config file, flags winning), runs its sweep on a rayon pool, and writes
//! rows in config order so output is byte-stable for a given config.

pub mod args;
pub mod commands;
pub mod config;
pub mod fit;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command, Flags};
pub use config::Settings;
pub use fit::{FitModel, FitResult};
pub use output::RunRecord;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(adiagrover::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<adiagrover::Error> for CliError {
    fn from(e: adiagrover::Error) -> Self {
        use adiagrover::Error as E;
        match e {
            E::InvalidSpec(_)
            | E::SiteDimension { .. }
            | E::Dimension { .. }
            | E::UnsupportedAncilla(_)
            | E::NegativeEigenvalueCount { .. }
            | E::ZeroSectorEnergy { .. }
            | E::SignStructure(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command; results go to `--out` or `stdout`, diagnostics
/// to `stderr`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let (flags, runner): (&Flags, fn(&Settings, &mut dyn Write, &mut dyn Write) -> CliResult<()>) = match &cli.command {
        Command::OracleInfidelity(f) => (f, commands::oracle_infidelity::run),
        Command::GroverRun(f) => (f, commands::grover_run::run),
        Command::SectorPhase(f) => (f, commands::sector_phase::run),
        Command::OverlapEstimate(f) => (f, commands::overlap_estimate::run),
    };
    let settings = Settings::resolve(flags)?;
    let threads = settings.get_or("threads", 0usize)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let (result, out_buf, err_buf) = pool.install(|| {
        let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
        let result = runner(&settings, &mut out_buf, &mut err_buf);
        (result, out_buf, err_buf)
    });
    // output written before a late failure (flagged rows) is still emitted
    stderr.write_all(&err_buf)?;
    if result.is_ok() || !out_buf.is_empty() {
        match settings.raw("out") {
            Some(path) => std::fs::write(path, &out_buf)?,
            None => stdout.write_all(&out_buf)?,
        }
    }
    result
}

/// Parse and run; clap failures (including help) become `Usage`.
pub fn run_from<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(&cli, stdout, stderr)
}
