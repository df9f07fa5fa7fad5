//! Command-line harness for seeded hypervector experiments and encoders.
//!
//! Exit codes: 0 on success, 2 for invalid flags or config, 1 for failures
//! while running. `HYPERALG_THREADS` caps the worker threads; results do not
//! depend on it.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

pub const THREADS_ENV: &str = "HYPERALG_THREADS";

fn threads() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(0),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!(
                "invalid {THREADS_ENV}={v:?}: expected a positive integer"
            ))),
        },
        Err(e) => Err(CliError::Config(format!("invalid {THREADS_ENV}: {e}"))),
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads()?)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Concentration(o) => commands::concentration::run(o),
        Command::Capacity(o) => commands::capacity::run(o),
        Command::Encode(o) => commands::encode::run(o),
        Command::Roundtrip(o) => commands::roundtrip::run(o),
    })
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
