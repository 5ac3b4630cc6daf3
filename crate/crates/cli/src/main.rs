mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::Settings;
use error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sweep(a) => commands::run_sweep(&Settings::resolve(a)?),
        Command::Crossover(a) => commands::run_crossover(&Settings::resolve(a)?),
        Command::Grid(a) => commands::run_grid(&Settings::resolve(a)?),
        Command::Reproduce(a) => commands::run_reproduce(a.target, &a.out),
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
