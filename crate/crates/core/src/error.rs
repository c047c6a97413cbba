use thiserror::Error;

pub type Result<T, E = CapError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CapError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} is too small, need a prime p >= 5")]
    ModulusTooSmall(u32),
    #[error("b = {b} is degenerate modulo {p}: b must lie in 1..={max}", max = .p - 2)]
    DegenerateEquation { b: u32, p: u32 },
    #[error("digit {digit} is not a residue modulo {p}")]
    DigitOutOfRange { digit: u32, p: u32 },
    #[error("digit {0} is listed more than once")]
    DuplicateDigit(u32),
    #[error("a digit set needs at least {min} digits, got {got}")]
    TooFewDigits { min: usize, got: usize },
    #[error("fixed digit {0} is not in the digit set")]
    FixedNotInDigits(u32),
    #[error("dimension n = {n} must be a multiple of |D| = {size}")]
    Divisibility { n: usize, size: usize },
    #[error("enumeration of {count} points exceeds the limit of {limit}")]
    EnumerationTooLarge { count: String, limit: u64 },
    #[error("instance too large to enumerate: {0}")]
    InstanceTooLarge(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("digit sets have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
