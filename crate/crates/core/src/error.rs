use thiserror::Error;

/// Errors raised by the library.
///
/// Randomized procedures never fail because of bad luck; a verifier that
/// overflows or a learner that misses is reported as data on the returned
/// certificate or verdict. Errors are reserved for misuse and for requests
/// the exact machinery refuses to serve.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter or argument violates an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// The request is well formed but exceeds what exact enumeration supports.
    #[error("capability error: {0}")]
    Capability(String),
    /// A procedure's input contract does not hold (e.g. binary search on equal values).
    #[error("contract error: {0}")]
    Contract(String),
    /// Malformed text in one of the serialized formats.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}
