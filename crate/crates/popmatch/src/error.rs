use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A matching refers to a non-edge or matches a node twice.
    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    /// Operation requires a bipartite instance.
    #[error("instance must be bipartite for {0}")]
    NotBipartite(&'static str),

    /// A stated precondition does not hold for the given arguments.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An enumeration exceeded its budget; distinct from "none exists".
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A witness file does not assign a value to every node.
    #[error("witness missing node {0}")]
    WitnessMissingNode(String),

    /// Internal consistency identity failed; indicates a bug, never ignored.
    #[error("internal consistency violation: {0}")]
    InternalCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
