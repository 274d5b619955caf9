//! Command-line driver for `bigibbs`: experiment configs, command dispatch
//! and reproducible output files.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

pub use commands::{run_command, Cli};
pub use config::{parse_config, ConfigErrors, ConfigIssue, ExperimentConfig, IssueKind};
pub use output::RunManifest;

pub const EXIT_OK: u8 = 0;
/// An identity was rejected, after the retry if enabled.
pub const EXIT_VERIFICATION_FAILED: u8 = 1;
/// Bad arguments, config, input files or library parameters.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid config {}:\n{errors}", path.display())]
    Config { path: PathBuf, errors: ConfigErrors },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Samples {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Library(#[from] bigibbs::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        EXIT_USAGE
    }
}
