use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate overflow while translating a site")]
    CoordinateOverflow,

    #[error("{what} would need {needed} but the budget is {budget}")]
    ResourceLimit {
        what: &'static str,
        needed: String,
        budget: String,
    },

    #[error("the SFT spec carries no si_gap assertion, which this operation requires")]
    MissingSiGap,

    #[error("language membership undecided at level {level}; refusing to certify")]
    Undecided { level: u32 },

    #[error("no admissible pattern on the requested shape: the subshift is empty there")]
    EmptySubshift,

    #[error("pattern domain does not cover the sites the potential needs to read")]
    InsufficientDomain,

    #[error("interval lower bound must be positive to take a logarithm")]
    NonpositiveLog,

    #[error("division by an interval containing zero")]
    DivisionByZero,

    #[error("the forbidden list is empty")]
    EmptyForbiddenList,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
