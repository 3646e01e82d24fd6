use thiserror::Error;

use crate::synthesis::Cover;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: u64, limit: u64 },

    #[error("bitmap size {what} exceeds the cap of {cap} bits")]
    Overflow { what: String, cap: u64 },

    #[error("operands do not match: {0}")]
    LengthMismatch(String),

    #[error("perfect shuffle needs equal-length parts whose length is a multiple of the block: {0}")]
    ShuffleArityMismatch(String),

    #[error("the language is empty")]
    EmptyLanguage,

    #[error("automaton is not ranked: {0}")]
    NotRanked(String),

    #[error("automaton is not trim: {0}")]
    NotTrim(String),

    #[error("automaton must have exactly one final state, found {0}")]
    MultipleFinals(usize),

    #[error("automaton is not deterministic: {0}")]
    Nondeterministic(String),

    #[error("cover search at rank {rank} exceeded its budget of {budget} nodes")]
    CoverBudgetExceeded {
        rank: usize,
        budget: u64,
        greedy: Box<Cover>,
    },

    #[error("word {0} does not change the language")]
    NoChange(String),

    #[error("{op}: bitmap route and automaton route disagree")]
    RouteDisagreement { op: String },

    #[error("{op}: measured {measured} violates bound {formula} ({detail})")]
    BoundViolation {
        op: String,
        measured: u64,
        formula: u64,
        detail: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
