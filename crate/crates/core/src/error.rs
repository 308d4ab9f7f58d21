use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A theorem's hypotheses are not met by the configured law or norm.
    #[error("{theorem}: hypothesis violated: {reason}")]
    Hypothesis { theorem: String, reason: String },

    /// A per-trial statistic failed.
    #[error("statistic failed for seed {seed}, stream {stream_id}: {message}")]
    Statistic {
        seed: u64,
        stream_id: u64,
        message: String,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn hypothesis(theorem: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Hypothesis {
            theorem: theorem.into(),
            reason: reason.into(),
        }
    }
}
