use thiserror::Error;

/// Failures mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{name}: {message}")]
    Validation { name: String, message: String },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation { .. } => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn validation(name: &str, message: impl Into<String>) -> Self {
        CliError::Validation {
            name: name.to_string(),
            message: message.into(),
        }
    }

    pub fn io(context: &str, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<transship_core::Error> for CliError {
    fn from(err: transship_core::Error) -> Self {
        CliError::Validation {
            name: err.name().to_string(),
            message: err.to_string(),
        }
    }
}
