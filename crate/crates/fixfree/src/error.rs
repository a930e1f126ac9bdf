use thiserror::Error;

/// Errors produced by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alphabet size {0}")]
    InvalidAlphabet(u32),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("level {level} is too large for q={q}")]
    LevelTooLarge { q: u32, level: usize },
    #[error("Kraft sum {sum} exceeds {bound}")]
    KraftExceeded { sum: String, bound: String },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("edge set is not Eulerian")]
    NotEulerian,
    #[error("edge set is disconnected")]
    Disconnected,
    #[error("sequence is not a closed path")]
    NotClosedPath,
    #[error("edge set is not 1-regular")]
    NotOneRegular,
    #[error("edge set is not {0}-regular")]
    NotKRegular(usize),
    #[error("perfect matching failed")]
    MatchingFailed,
    #[error("no such object exists: {0}")]
    Impossible(String),
    #[error("unsupported at this size or budget: {0}")]
    Unsupported(String),
    #[error("{0} has no finite base-q expansion")]
    InfiniteExpansion(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
