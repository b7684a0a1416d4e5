use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("field contains a non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("vorticity is not mean-zero (mean = {mean:e})")]
    NotMeanZero { mean: f64 },

    #[error("backward characteristic left the representable range")]
    OutOfResolution,

    #[error("numerical failure at step {step}: {reason}")]
    Numerical { step: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed field file at byte offset {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Domain(_) => 2,
            Error::NonFinite { .. }
            | Error::NotMeanZero { .. }
            | Error::OutOfResolution
            | Error::Numerical { .. } => 3,
            Error::Format { .. } | Error::Io(_) => 4,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
