use thiserror::Error;

use crate::scenario::Assignment;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported phase ν = {nu}: {reason}")]
    UnsupportedPhase { nu: String, reason: String },

    #[error("representation not applicable: {0}")]
    RepresentationInapplicable(String),

    #[error("search space of {required} assignments exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("no witness found: {0}")]
    NotFound(String),

    #[error("reduction of {name} (N = {n}) does not match its generic form at {counterexample:?}: {detail}")]
    ReductionMismatch {
        name: String,
        n: usize,
        counterexample: Assignment,
        detail: String,
    },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
