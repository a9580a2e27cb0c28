use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A high-precision value ran out of trusted digits.
    #[error("precision exhausted: {reason} (last trusted index {last_trusted})")]
    Precision { reason: String, last_trusted: usize },

    /// The operation needs a value mode the caller did not supply, e.g. a
    /// numeric value for a purely symbolic continued fraction, or a square
    /// root in exact field arithmetic.
    #[error("unsupported value mode: {0}")]
    UnsupportedMode(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A cross-check between two independent routes failed. This always
    /// signals a bug, never bad input.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedMode(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
