//! Batch front end for the `prsplit` solvers and certificates.
//!
//! Every command writes only under `--out`; reals are serialized with 17
//! significant digits so repeated runs can be compared byte for byte.

pub mod args;
pub mod commands;
pub mod output;
pub mod plot;
pub mod runner;

use std::ffi::OsString;

use args::{parse_with_config, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] prsplit_core::Error),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// At least one requested check failed or was skipped.
    AssertionFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::AssertionFailed => 1,
        }
    }
}

pub const EXIT_USAGE: i32 = 2;

pub fn run(cli: &args::Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Solve(a) => commands::cmd_solve(a),
        Command::Certify(a) => commands::cmd_certify(a),
        Command::InitTest(a) => commands::cmd_init_test(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_from_args<I, T>(argv: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(&parse_with_config(argv)?)
}
