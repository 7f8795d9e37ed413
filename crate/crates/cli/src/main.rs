mod args;
mod commands;
mod compare;
mod error;
mod grid;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic(f) => commands::analytic(&f.resolve()?),
        Command::Exact(f) => commands::exact(&f.resolve()?),
        Command::Simulate(f) => commands::simulate(&f.resolve()?),
        Command::Train(f) => commands::train(&f.resolve()?),
        Command::Sweep(f) => commands::sweep(&f.resolve()?),
        Command::Compare(f) => commands::compare(&f),
        Command::Fuzzy(f) => commands::fuzzy(&f.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
