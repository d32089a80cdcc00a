use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] gradrec_core::Error),
    #[error("{flag}: {source}")]
    Flag {
        flag: &'static str,
        #[source]
        source: gradrec_core::Error,
    },
    #[error("{flag}: {reason}")]
    Usage { flag: &'static str, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl AppError {
    pub fn usage(flag: &'static str, reason: impl Into<String>) -> Self {
        Self::Usage {
            flag,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 2 for numerical failures, 1 for everything the caller can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) | Self::Flag { source: e, .. } if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

pub trait FlagContext<T> {
    fn flag(self, flag: &'static str) -> Result<T, AppError>;
}

impl<T> FlagContext<T> for Result<T, gradrec_core::Error> {
    fn flag(self, flag: &'static str) -> Result<T, AppError> {
        self.map_err(|source| AppError::Flag { flag, source })
    }
}
