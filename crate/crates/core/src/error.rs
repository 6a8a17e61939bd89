use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} out of range for {what}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("matrix is not symplectic: rows {row_a} and {row_b} violate the symplectic form")]
    NotSymplectic { row_a: usize, row_b: usize },

    #[error("seed decimal list has {actual} rows, expected {expected}")]
    SeedRowCount { expected: usize, actual: usize },

    #[error("seed decimal {value} in row {row} does not fit in {bits} bits")]
    SeedValueRange { row: usize, value: u64, bits: usize },

    #[error("registry parse error at line {line}: {message}")]
    Registry { line: usize, message: String },

    #[error("decoding failure at trellis step {step}: no branch consistent with the syndrome")]
    DecodingFailure { step: usize },

    #[error("decoding failure in turbo iteration {iteration}: {source}")]
    TurboFailure {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("threshold bracket invalid: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
