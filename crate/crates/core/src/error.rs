use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element code {code} is out of range for a field of order {q}")]
    ElementOutOfRange { code: u64, q: u64 },

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vectors are linearly dependent")]
    Dependent,

    #[error("vector does not lie in the target subspace")]
    NotContained,

    #[error("{what} has size {size}, over the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("invalid parameters: {0}")]
    Domain(String),

    #[error("subspace meets the distinguished subspace N nontrivially")]
    MeetsN,

    #[error("the two vertices are identical")]
    IdenticalVertices,

    /// A construction or proof step failed its own postcondition.
    #[error("internal verification failed: {0}")]
    Internal(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn cap(what: &'static str, size: u128, cap: u128) -> Self {
        Error::CapExceeded { what, size, cap }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
