use thiserror::Error;

/// Errors raised by the library. The variants map one-to-one onto the
/// process exit codes used by the command line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments, violated preconditions, mismatched types.
    #[error("usage error: {0}")]
    Usage(String),

    /// Exact integer arithmetic left the representable range.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// A generation request would exceed the point budget.
    #[error("resource error: {what} needs about {estimate} points (budget {budget})")]
    Resource {
        what: String,
        estimate: u64,
        budget: u64,
    },

    /// An internal consistency check failed (for example two visible points
    /// sharing an angle).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// Malformed input text.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
