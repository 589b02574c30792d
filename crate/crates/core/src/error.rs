use thiserror::Error;

/// Errors raised by the toolkit. Indices in messages are 1-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported maximum 65536")]
    ModulusTooLarge(u64),
    #[error("value {value} is not a canonical residue modulo {q}")]
    NotCanonical { value: u64, q: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live in different fields (q={left} and q={right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("matrix has rank {rank}, full row rank {rows} required")]
    NotFullRank { rank: usize, rows: usize },
    #[error("no invertible pivot block after {retries} random column permutations")]
    RetryExhausted { retries: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("transformation has form {found}, expected {expected}")]
    WrongForm { expected: String, found: String },
    #[error("enumeration size {size} exceeds cap {cap}")]
    CapExceeded { size: String, cap: u64 },
    #[error("syndrome is zero")]
    ZeroSyndrome,
    #[error("vector is zero")]
    ZeroVector,
    #[error("matrix is not a generalized inverse")]
    NotAGi,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("operation requires the binary field, got q={0}")]
    WrongField(u32),
    #[error("{0} variables exceed the brute-force limit of 24")]
    TooManyVars(usize),
    #[error("search space of {0} vectors exceeds the enumeration cap")]
    TooLarge(String),
    #[error("system is inconsistent: right-hand side is not in the column space")]
    Inconsistent,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
