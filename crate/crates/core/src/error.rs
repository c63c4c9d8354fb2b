use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions of the operands do not fit together.
    #[error("shape error: {0}")]
    Shape(String),
    /// Input lies outside the domain of the operation (non-Hermitian, k out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A file payload is malformed.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
