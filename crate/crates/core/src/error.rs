use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid input: {0}")]
    Input(String),
    /// The request exceeds a size budget (dense dimension, enumeration size, ...).
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// An internal invariant broke; this indicates a bug rather than bad input.
    #[error("structural failure: {0}")]
    Structural(String),
    /// A projector annihilated every trial vector.
    #[error("degenerate construction: {0}")]
    Degeneracy(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}
