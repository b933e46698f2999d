use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("weight {weight} exceeds cap {cap}")]
    WeightExceeded { weight: usize, cap: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible size: {0}")]
    Infeasible(String),

    #[error("probe budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("probe at position {position} outside oracle of length {len}")]
    ProbeOutOfRange { position: usize, len: usize },

    #[error("verification failed at index {index}: agreement {agree}/{of} below required {required}/{of}")]
    VerificationFailed {
        index: usize,
        agree: usize,
        of: usize,
        required: usize,
    },

    #[error("construction failed after {attempts} attempts: {reason}")]
    ConstructionFailed { attempts: usize, reason: String },

    #[error("decoder randomness not enumerable: more than {limit} outcomes")]
    NotEnumerable { limit: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
