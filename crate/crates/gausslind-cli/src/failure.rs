//! Failures of a CLI run and their mapping to exit codes.

use serde_json::json;
use thiserror::Error;

/// Everything that can stop a run.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration could not be read, parsed or validated.
    #[error("configuration error: {0}")]
    Config(String),
    /// The library rejected the input or failed numerically.
    #[error(transparent)]
    Library(#[from] gausslind::error::Error),
    /// An output file could not be written.
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
    /// One or more self-checks failed.
    #[error("self-check failed: {0}")]
    Check(String),
}

impl CliError {
    /// Exit status: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Library(e) if e.is_numerical() => 3,
            CliError::Library(_) => 2,
            CliError::Check(_) => 3,
        }
    }

    /// Stable identifier of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Library(e) => e.kind(),
            CliError::Output { .. } => "OutputError",
            CliError::Check(_) => "SelfCheckFailure",
        }
    }

    /// The single-line JSON object emitted on stderr.
    pub fn to_json(&self) -> String {
        let category = if self.exit_code() == 2 { "config" } else { "numeric" };
        json!({
            "error": category,
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}
