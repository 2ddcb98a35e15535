use thiserror::Error;

/// Errors raised by the library. Every fallible public operation returns one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("cut exhausted: {0}")]
    CutExhausted(String),

    #[error("Markov iteration did not stabilize after {steps} steps")]
    NotStabilized {
        steps: usize,
        /// Serialized form of the last two iterates, kept for diagnosis.
        last_two: Box<(String, String)>,
    },

    #[error("term count {count} exceeds the cap {cap}")]
    TermCap { count: usize, cap: usize },

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("elements belong to different weight sessions")]
    MixedWeights,

    #[error("operand is not harmonic: {0}")]
    NotHarmonic(String),

    #[error("operation requires uniform weights: {0}")]
    NonUniformWeights(String),

    #[error("not a projection: {0}")]
    NotProjection(String),

    #[error("no solution within bound {0}")]
    NoSolutionWithinBound(u32),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}
