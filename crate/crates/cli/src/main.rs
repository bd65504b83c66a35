mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] nhsta::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical or I/O failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(e) if e.is_config() => 2,
            CliError::Run(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Shapes(a) => commands::shapes_cmd(a),
        Command::Transfer(a) => commands::transfer(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
