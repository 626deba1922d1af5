use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("agent index {agent} exceeds n={n}")]
    AgentOutOfRange { agent: usize, n: usize },

    #[error("agent count must be at least 1")]
    NoAgents,

    #[error("formula argument {index} is not {index}-local: {formula}")]
    NotLocal { index: usize, formula: String },

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),

    #[error("frame has no worlds")]
    EmptyFrame,

    #[error("agent count mismatch: {left} vs {right}")]
    AgentMismatch { left: usize, right: usize },

    #[error("distributed knowledge requires an equivalence model")]
    DistOnNonEquivalence,

    #[error("operator not supported here: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
