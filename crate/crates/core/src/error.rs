use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("polynomial division by zero")]
    DivisionByZeroPoly,
    #[error("polynomial is not invertible modulo the given modulus")]
    NotInvertibleMod,
    #[error("unsupported field degree {0}")]
    UnsupportedField(u32),
    #[error("reduction polynomial {0:#x} is not irreducible of the stated degree")]
    ReducibleModulus(u32),
    #[error("value {value} is not an element of GF(2^{m})")]
    ElementOutOfRange { value: u32, m: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("syndrome lies outside the decoding radius")]
    NotDecodable,
    #[error("weight mismatch: expected {expected}, found {found}")]
    WeightMismatch { expected: usize, found: usize },
    #[error("unknown parameter set: {0}")]
    UnknownParams(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn dims(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }
}
