use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A NaN reached an API boundary.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result or argument outside the supported finite range.
    #[error("range error: {0}")]
    Range(String),
    /// Caller violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The function under refinement produced NaN at `x` (hex-float rendering).
    #[error("domain hole: f({x}) is NaN")]
    DomainHole { x: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
