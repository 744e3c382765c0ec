// SPDX-License-Identifier: MIT OR Apache-2.0

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or unparseable / invalid input data.
    #[error("input error: {0}")]
    Input(String),
    /// A result failed one of its own consistency checks.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) | CliError::Io(_) => ExitCode::from(1),
            CliError::Invariant(_) => ExitCode::from(2),
        }
    }
}

impl From<optblocks_core::Error> for CliError {
    fn from(e: optblocks_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
