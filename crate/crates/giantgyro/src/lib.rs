//! Command-line front end for the giant-cavity gyroscope simulator:
//! TOML run configuration, CSV output and the validation battery.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

pub use cli::Cli;
pub use config::{Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] giantgyro_core::Error),
}

impl CliError {
    /// 1 for failed checks and numerical failures, 2 for bad input.
    #[must_use]
    pub fn exit_code(&self) -> u8 {
        use giantgyro_core::Error as E;
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Core(
                E::SingularResponse { .. } | E::DegenerateElimination { .. } | E::UndefinedSigma,
            ) => 1,
            CliError::Usage(_) | CliError::Io(_) | CliError::Core(_) => 2,
        }
    }
}

/// Parses `args` (program name first), runs the command and maps the result
/// to a process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    match cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
