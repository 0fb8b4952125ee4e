use thiserror::Error;

/// Errors produced by every stage of the synthesis pipeline and the audit harness.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid test function: {0}")]
    InvalidFunction(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("nu not dominated by mu")]
    NotDominated,

    #[error("datasets are not add/remove-one neighbors")]
    NotNeighbors,

    #[error(
        "privacy gate failed: n = {n} is below the required {required_n:.1} for epsilon = {epsilon}"
    )]
    PrivacyGate {
        n: usize,
        required_n: f64,
        epsilon: f64,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
