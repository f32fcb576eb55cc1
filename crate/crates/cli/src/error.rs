use thiserror::Error;

use typexp_core::Error as CoreError;

/// Failure of a CLI command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Enumeration(CoreError),

    #[error(transparent)]
    Quantization(CoreError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Core(_) => 2,
            CliError::Enumeration(_) => 3,
            CliError::Quantization(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::EnumerationOverflow { .. } => CliError::Enumeration(e),
            CoreError::InvalidQuantization { .. } => CliError::Quantization(e),
            CoreError::Io(source) => CliError::io("i/o error", source),
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
