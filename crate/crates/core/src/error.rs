use thiserror::Error;

/// Errors raised by the search, bias, and expressivity computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("distribution is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("C({n}, {k}) = {count} targets exceeds the enumeration cap of {cap}")]
    TooLarge {
        n: usize,
        k: usize,
        count: u128,
        cap: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid algorithm spec: {0}")]
    InvalidAlgorithmSpec(String),

    #[error("no strategy supplied for resource `{0}`")]
    MissingStrategy(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
