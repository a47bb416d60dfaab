use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments, caught before any processing.
    #[error("{0}")]
    Validation(String),
    #[error("{}: file not found", .0.display())]
    FileNotFound(PathBuf),
    /// Input data that cannot be processed.
    #[error("{0}")]
    Data(String),
    #[error("{path}: {malformed} of {total} lines malformed (first at line {first_line}: {first_message})")]
    TooManyMalformed {
        path: String,
        malformed: usize,
        total: usize,
        first_line: usize,
        first_message: String,
    },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::FileNotFound(_) => EXIT_VALIDATION,
            CliError::Data(_) | CliError::TooManyMalformed { .. } => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::FileNotFound(path.to_path_buf())
        } else {
            CliError::Internal(format!("{}: {e}", path.display()))
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
