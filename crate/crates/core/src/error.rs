use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large for exhaustive enumeration: n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("TSPLIB parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
