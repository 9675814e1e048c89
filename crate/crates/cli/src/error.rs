use thiserror::Error;

use crate::spec::ParseError;

/// Everything that makes the CLI exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("column {column}: {message}")]
    Spec { column: usize, message: String },

    #[error(transparent)]
    Core(#[from] chernforge::Error),

    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type CliResult<T> = Result<T, CliError>;
