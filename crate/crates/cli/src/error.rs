use std::fmt;

/// Failures that map onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad config, bad report directory, unreadable CSV. Exit status 2.
    #[error("parse error: {0}")]
    Parse(String),
    /// The experiment itself failed to produce a value. Exit status 1.
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn parse(msg: impl fmt::Display) -> Self {
        CliError::Parse(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<dispersive_lab::LabError> for CliError {
    fn from(e: dispersive_lab::LabError) -> Self {
        match e {
            dispersive_lab::LabError::InvalidInput(m) | dispersive_lab::LabError::Parse(m) => CliError::Parse(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
