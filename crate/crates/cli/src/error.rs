use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] renewal_ldp::Error),
}

impl CliError {
    /// 2 for unreadable or malformed input, 3 for invalid models and
    /// parameters, 4 when a solver fails to converge, 1 for output failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Core(renewal_ldp::Error::NonConvergence { .. }) => 4,
            CliError::Core(_) => 3,
            CliError::Write { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Parse(_) => "parse",
            CliError::Validation(_) | CliError::Core(_) if self.exit_code() == 3 => "validation",
            _ => "non_convergence",
        }
    }
}

/// What goes to stderr when a command fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub command: String,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub exit_code: u8,
    pub message: String,
}

impl ErrorReport {
    pub fn new(command: &str, err: &CliError) -> Self {
        ErrorReport {
            schema_version: crate::report::SCHEMA_VERSION,
            command: command.to_string(),
            error: ErrorBody { kind: err.kind().into(), exit_code: err.exit_code(), message: err.to_string() },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
