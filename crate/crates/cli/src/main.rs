use std::process::ExitCode;

use prsplit_cli::{run_from_args, CliError, EXIT_USAGE};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run_from_args(std::env::args_os()) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("prsplit: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
