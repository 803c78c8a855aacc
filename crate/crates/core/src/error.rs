use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Bad arguments or a violated precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A basis would exceed the configured ambient-dimension cap.
    #[error("resource limit: ambient dimension {requested} exceeds cap {cap}")]
    Resource { requested: usize, cap: usize },

    /// Two independent routes to the same quantity disagree.
    #[error("verification failed for {what}: {left} != {right}")]
    Verification {
        what: String,
        left: String,
        right: String,
    },
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Resource { .. } => 3,
            Error::Verification { .. } => 1,
        }
    }
}
