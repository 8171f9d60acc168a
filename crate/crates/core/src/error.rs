use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("CPT of variable {variable} is not normalized: row {row} sums to {sum}")]
    NotNormalized { variable: String, row: usize, sum: f64 },

    #[error("parent relation contains a cycle through variable {0}")]
    Cycle(String),

    #[error("decision variable {0} has parents or a CPT")]
    DecisionWithParents(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    #[error("factor error: {0}")]
    Factor(String),

    #[error("invalid ordering: {0}")]
    Ordering(String),

    #[error("evidence has probability zero")]
    ImpossibleEvidence,

    #[error("theory is unsatisfiable")]
    Unsatisfiable,

    #[error("model generation hit a dead end at proposition {0}")]
    DeadEnd(usize),

    #[error("instance too large for enumeration: {cells} joint cells exceeds {limit}")]
    TooLarge { cells: u128, limit: u128 },
}

impl Error {
    pub(crate) fn factor(msg: impl Into<String>) -> Self {
        Error::Factor(msg.into())
    }

    pub(crate) fn ordering(msg: impl Into<String>) -> Self {
        Error::Ordering(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::InvalidModel(msg.into())
    }
}
