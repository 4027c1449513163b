use thiserror::Error;

/// Errors raised by the exact engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("invalid ring declaration: {0}")]
    Ring(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("reduction budget of {0} steps exceeded")]
    StepLimit(u64),

    #[error("soft time limit exceeded")]
    Timeout,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no solution within bounds: {0}")]
    NotFound(String),

    #[error("inconsistent verdicts on edge {edge}: {detail}")]
    Contradiction { edge: String, detail: String },
}

impl Error {
    /// True for errors coming from resource limits rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::StepLimit(_) | Error::Timeout)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
