use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shift {z} is within tolerance of Ritz value {ritz}")]
    SingularShift { ritz: f64, z: Complex64 },

    #[error("function is not defined at {at}: {reason}")]
    Domain { at: f64, reason: String },

    #[error("integrand is not finite at contour node {z}")]
    SingularIntegrand { z: Complex64 },

    #[error("contour does not separate the required sets: {0}")]
    Enclosure(String),

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

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

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
