//! Command-line front end for `thermalsum-core`.
//!
//! Exit codes: 0 success, 1 failed `--check` or runtime failure, 2 usage or
//! precondition error, 3 missing input data.

pub mod args;
pub mod checks;
mod commands;
mod reproduce;
mod rundir;

use std::ffi::OsString;
use std::io;

use clap::Parser;
use thiserror::Error;

use thermalsum_core::data_io::DataError;
use thermalsum_core::fitting::FitError;
use thermalsum_core::model::ModelError;
use thermalsum_core::regime::EstimationError;
use thermalsum_core::sim::SimError;

pub use args::{Cli, Command};
pub use rundir::{run_name, RunDir};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) | CliError::Model(_) => 2,
            CliError::Sim(SimError::InvalidSpec(_) | SimError::InvalidTau(_))
            | CliError::Sim(SimError::NoReplicates | SimError::Model(_)) => 2,
            CliError::MissingData(_) => 3,
            _ => 1,
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Approx(a) => commands::approx(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Join(a) => commands::join(&a),
        Command::Bin(a) => commands::bin(&a),
        Command::Reproduce(a) => reproduce::reproduce(&a),
    }
}
