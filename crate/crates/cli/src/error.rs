use std::path::PathBuf;

use colprim_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(CoreError),
    #[error("{0}")]
    Budget(CoreError),
    #[error("not column-primitive")]
    NotColumnPrimitive,
    #[error("certificate failed re-verification: {0}")]
    Unverified(String),
    #[error("reduction check failed: {0}")]
    ReductionMismatch(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Input(_) | CliError::Usage(_) => 2,
            CliError::NotColumnPrimitive => 1,
            CliError::Budget(_) => 3,
            CliError::Unverified(_) | CliError::ReductionMismatch(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded(_) | CoreError::StateSpaceExceeded(_) => CliError::Budget(e),
            CoreError::NotColumnPrimitive => CliError::NotColumnPrimitive,
            e => CliError::Input(e),
        }
    }
}
