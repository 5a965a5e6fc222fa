//! Process-level error handling: usage problems exit with 2, numerical or
//! I/O failures with 1.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations; the message names the offending flag.
    Usage(String),
    /// A computation or output write failed after arguments were accepted.
    Failure(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fairnoma_core::Error> for CliError {
    fn from(e: fairnoma_core::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("output failed: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(format!("serialization failed: {e}"))
    }
}
