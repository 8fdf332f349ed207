//! Command-line front end: `analyze`, `shuffle-test`, `evolve` and `synth`.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 ingestion error
//! (unreadable or malformed input), 4 analysis error, 5 output error.

pub mod args;
pub mod commands;
pub mod report;

use args::{Cli, Command};
use mfdfa::MfdfaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("ingestion: {0}")]
    Ingestion(String),
    #[error("analysis: {0}")]
    Analysis(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Ingestion(_) => 3,
            CliError::Analysis(_) => 4,
            CliError::Output(_) => 5,
        }
    }

    pub(crate) fn ingestion(e: MfdfaError) -> Self {
        CliError::Ingestion(e.to_string())
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::ShuffleTest(a) => commands::shuffle_test(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Synth(a) => commands::synth(a),
    }
}
