use thiserror::Error;

/// Errors produced by orbitcert operations.
///
/// Mathematical verdicts that merely "fail" (a criterion does not hold) are
/// reported through verdict types, not through this enum. An `Error` means the
/// caller asked for something that cannot be produced.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected at most {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tail domination fails at k = {witness_k}")]
    DominationFails { witness_k: usize },

    #[error("orbit criterion fails at k = {witness_k}")]
    CriterionFails { witness_k: usize },

    #[error("intermediate majorization fails at k = {k}")]
    IntermediateMajorizationFails { k: usize },

    #[error("allocation infeasible in block {block}: candidates exhausted")]
    Infeasible { block: usize },

    #[error("no finite constant: b = 0 while a != 0")]
    NoFiniteConstant,

    #[error("ratio is unbounded: b = 0 while a != 0")]
    Unbounded,

    #[error("oracle size guard: support {size} exceeds limit {limit}")]
    OracleSizeLimit { size: usize, limit: usize },

    #[error("weight table too short: need index {needed}, table has {available}")]
    WeightHorizon { needed: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
