use std::path::PathBuf;

use rxnsplit_core::eval::{BaselineError, MissingPrediction};
use rxnsplit_core::shift::ShiftError;
use rxnsplit_core::splits::SplitError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}: {message}")]
    Schema { file: String, line: usize, message: String },
    #[error("manifest {manifest} was built from corpus {expected}, but the corpus given has digest {actual}")]
    DigestMismatch { manifest: String, expected: String, actual: String },
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    MissingPrediction(#[from] MissingPrediction),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// 2 usage, 3 data or schema, 4 insufficient data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Split(SplitError::InvalidParameter(_)) => 2,
            Error::Split(SplitError::InsufficientData { .. })
            | Error::Shift(ShiftError::InsufficientData { .. })
            | Error::Baseline(BaselineError::EmptyIndex) => 4,
            Error::Io { .. } | Error::Schema { .. } | Error::DigestMismatch { .. } | Error::MissingPrediction(_) => 3,
        }
    }
}
