use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("length mismatch in {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{file}:{line}: {reason}")]
    Parse {
        file: &'static str,
        line: usize,
        reason: String,
    },

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("{file} is empty")]
    EmptyFile { file: &'static str },

    #[error("duplicate paper id `{0}`")]
    DuplicateId(String),

    #[error("line {line}: unknown paper id `{id}`")]
    UnknownNode { line: usize, id: String },

    #[error("topic `{topic}` has {available} papers, {required} required for training")]
    TopicTooSmall {
        topic: String,
        available: usize,
        required: usize,
    },

    #[error("validation quota {requested} unreachable: only {available} papers remain after training selection")]
    ValidationQuotaUnreachable { requested: usize, available: usize },

    #[error("network build failed at `{block}`: {reason}")]
    Build { block: String, reason: String },

    #[error("encoder target {index} out of range for cluster `{cluster}` of size {size}")]
    TargetOutOfRange { cluster: String, index: usize, size: usize },

    #[error("network is not quiescent: {0}")]
    NotQuiescent(String),

    #[error("at least {required} observations are needed to fit a surrogate, got {got}")]
    TooFewObservations { required: usize, got: usize },

    #[error("search space exhausted: all {0} grid points observed")]
    SpaceExhausted(usize),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
