use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Variants are grouped into the coarse [`ErrorKind`] categories that the CLI
/// and the C ABI map to exit/status codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("map contains invalid (sentinel) pixels; fill them first")]
    SentinelPresent,

    #[error("degenerate training set: no eigenpair above the eigenvalue floor")]
    DegenerateTrainingSet,

    #[error("point not visible: {0}")]
    NotVisible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: bad magic, expected {expected:?}")]
    BadMagic { path: PathBuf, expected: String },

    #[error("{path}: unsupported format version {version}")]
    UnsupportedVersion { path: PathBuf, version: u32 },

    #[error("{path}: truncated payload at byte offset {offset} (needed {needed} more bytes)")]
    TruncatedPayload {
        path: PathBuf,
        offset: u64,
        needed: u64,
    },

    #[error("{path}: invariant violation: {reason}")]
    InvariantViolation { path: PathBuf, reason: String },

    #[error("{path}: unsupported format: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("{path}:{line}: parse error: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{path}: duplicate coordinate ({row}, {col}) on lines {first_line} and {second_line}")]
    DuplicateCoordinate {
        path: PathBuf,
        row: usize,
        col: usize,
        first_line: u64,
        second_line: u64,
    },
}

/// Coarse error category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::SentinelPresent
            | Error::NotVisible(_) => ErrorKind::Validation,
            Error::DegenerateTrainingSet | Error::Numerical(_) => ErrorKind::Numerical,
            Error::Io { .. }
            | Error::BadMagic { .. }
            | Error::UnsupportedVersion { .. }
            | Error::TruncatedPayload { .. }
            | Error::InvariantViolation { .. }
            | Error::UnsupportedFormat { .. }
            | Error::Parse { .. }
            | Error::DuplicateCoordinate { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
