use std::path::Path;

use thiserror::Error;

/// Campaign-level failures; any of these ends the run with exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed report {path}: {message}")]
    Report { path: String, message: String },
    #[error("usage error: {0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    pub fn report(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Report { path: path.display().to_string(), message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
