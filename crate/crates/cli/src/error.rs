use biharmonic_core::Error as CoreError;
use thiserror::Error;

/// Exit 0: expectations met. Exit 1: mathematical mismatch or infeasible
/// parameters. Exit 2: usage error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Math(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}
