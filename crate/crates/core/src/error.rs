use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value is not an integer (prime {prime} has exponent {exponent})")]
    NotAnInteger { prime: u64, exponent: i64 },

    #[error("{value} is outside the sieve range 2..={limit}")]
    OutOfRange { value: u64, limit: u64 },

    #[error("exponent overflow at prime {0}")]
    ExponentOverflow(u64),

    #[error("checkpoint I/O failed: {0}")]
    CheckpointIo(#[from] std::io::Error),

    #[error("malformed checkpoint: {0}")]
    CheckpointFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
