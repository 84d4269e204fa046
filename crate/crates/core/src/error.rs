use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VrviError {
    /// An input violated a documented domain requirement.
    #[error("rejected input: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Incompatible combination of algorithm, geometry, oracle or parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A non-finite value appeared in an iterate or dual coordinate.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Exhaustive enumeration was requested on a support that is too large.
    #[error("support of size {size} exceeds the enumeration bound {bound}")]
    SupportTooLarge { size: usize, bound: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, VrviError>;

impl From<std::io::Error> for VrviError {
    fn from(e: std::io::Error) -> Self {
        VrviError::Io(e.to_string())
    }
}
