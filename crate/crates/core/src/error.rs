use thiserror::Error;

use crate::structure::TamenessWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("ground set of size {n} exceeds the enumeration limit {limit}; use Monte Carlo sampling instead")]
    Capacity { n: usize, limit: usize },

    #[error("LP support has {size} subsets, above the solver limit {limit}")]
    LpCapacity { size: usize, limit: usize },

    #[error("threshold is undefined for a trivial family (empty or full)")]
    UndefinedThreshold,

    #[error("value {0} is not attained by the fractional expectation on (0, 1]")]
    UnreachableValue(f64),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("family is not tame: supplement family of {witness} violates the bound")]
    NotTame { witness: TamenessWitness },

    #[error("bound undefined: {0}")]
    UndefinedBound(&'static str),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
}
