//! `gl3gps`: command line front end for the GL(3) spectral toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical failure.

mod commands;
mod config;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::RunConfig;
use report::{Format, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(gl3gps::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<gl3gps::Error> for CliError {
    fn from(e: gl3gps::Error) -> Self {
        match e {
            gl3gps::Error::InvalidArgument(m) | gl3gps::Error::RangeExceeded(m) => CliError::Usage(m),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

/// A finished command: its report and whether its checks passed.
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

impl Outcome {
    pub fn ok(report: Report) -> Self {
        Self { report, passed: true }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gl3gps", version, about = "Whittaker functions, Kuznetsov kernels and Kloosterman sums on GL(3)")]
struct Cli {
    /// Target tolerance, in (1e-14, 1e-1).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: commands::Command,
}

impl Cli {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::from_env()?;
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(n) = self.threads {
            cfg.threads = n;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(p) = &self.out {
            cfg.out = Some(p.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = cli.config()?;
    // a second initialisation only fails if a pool already exists, which is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    let outcome = commands::dispatch(cli.command, &cfg)?;
    let text = outcome.report.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(gl3gps::Error::RangeExceeded("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(gl3gps::Error::NotFinite("x".into())).exit_code(), 3);
    }
}
