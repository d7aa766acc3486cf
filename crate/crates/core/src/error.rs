use thiserror::Error;

use crate::jets::CountTable;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no rational form with the supplied denominator factors reproduces the prefix ({terms} terms)")]
    FitFailure { terms: usize },

    #[error("Hadamard product failed verification at T^{index}")]
    HadamardVerification { index: usize },

    #[error("limit at infinity does not exist (degree {degree} > 0)")]
    LimitUndefined { degree: i64 },

    #[error("ambient dimension {dim} exceeds the supported bound {max}")]
    DimensionLimit { dim: usize, max: usize },

    #[error("set is unbounded")]
    Unbounded,

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("fitted limit {limit} disagrees with -chi = {expected}")]
    LimitMismatch { limit: String, expected: i128 },

    #[error("polynomial does not vanish at the base point (value {value})")]
    NonVanishing { value: String },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("node budget of {budget} exhausted")]
    ResourceLimit { budget: u64 },

    #[error("point counts are not a polynomial of degree <= {degree_bound}")]
    Interpolation { degree_bound: usize, table: CountTable },

    #[error("not enough admissible primes: need {needed}, have {have}")]
    NotEnoughPrimes { needed: usize, have: usize },

    #[error("Frobenius-trace recurrence not found within {max_extension} extension degrees")]
    FrobeniusFit { max_extension: u32 },

    #[error("jet order {m}: {source}")]
    AtOrder {
        m: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed resolution data: {0}")]
    Malformed(String),

    #[error("stratum {0:?} has no class_L")]
    MissingClass(Vec<String>),

    #[error("no monodromy period m0 <= {max} fits the sequence")]
    NoPeriod { max: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
