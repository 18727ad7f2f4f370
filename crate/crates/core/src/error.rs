use thiserror::Error;

/// Errors raised by the library. Verdicts such as "not allowable" or a
/// diverging ladder are values, not errors; these variants cover malformed
/// input and violated preconditions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("negative exponent at position {0}")]
    NegativeExponent(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,

    #[error("genuine logarithmic term in exterior derivative (coefficient not divisible by r{0})")]
    LogTermInDerivative(usize),

    #[error("incompatible forms: {0}")]
    FormMismatch(String),

    #[error("map is not monomial on divisor coordinate {0}")]
    NonMonomialChart(usize),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("region is unbounded: {0}")]
    Unbounded(String),

    #[error("nonlinear cell: exact decision unavailable ({0})")]
    Nonlinear(String),

    #[error("invalid center: {0}")]
    InvalidCenter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("iteration cap {0} exceeded")]
    CapExceeded(usize),

    #[error("missing witness polynomial for face {0}")]
    MissingWitness(String),

    #[error("fiber count exceeded cap {0}")]
    FiberCapExceeded(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
