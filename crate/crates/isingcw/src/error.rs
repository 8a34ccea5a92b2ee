use std::io;
use std::path::PathBuf;

use isingcw_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Model(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn parse(origin: impl Into<String>, message: impl Into<String>) -> Self {
        AppError::Parse { origin: origin.into(), message: message.into() }
    }

    /// 2 input error, 3 enumeration cap exceeded, 4 I/O failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Model(CoreError::CapExceeded { .. }) => 3,
            AppError::Model(_) | AppError::Parse { .. } | AppError::Usage(_) => 2,
            AppError::Io { .. } | AppError::Output(_) | AppError::Csv(_) => 4,
        }
    }
}
