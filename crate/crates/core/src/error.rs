use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown user id `{0}`")]
    UnknownUser(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("both content sets are empty; shared-interest distance is undefined")]
    EmptyContentSets,

    #[error("{what} {value} is outside the valid range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("partition source `{partition}` does not match vote-log initiator `{initiator}`")]
    SourceMismatch { partition: String, initiator: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("solver became unstable at step {step} (t = {time:.4} h, node {node}): value {value}")]
    Instability {
        step: usize,
        time: f64,
        node: usize,
        value: f64,
    },

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from bad input rather than a runtime failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Instability { .. } | Error::FitFailure(_) | Error::Io(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
