use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty trace word")]
    EmptyTraceWord,

    #[error("non-integer exponent: integrate only after pairing contraction ({0})")]
    NonIntegerExponent(String),

    #[error("{value} is not the square of a rational; cannot substitute under a half-integer power of {symbol}")]
    NotASquare { symbol: String, value: String },

    #[error("permutation error: {0}")]
    Perm(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("linear map undefined on symbol {0}")]
    UndefinedSymbol(String),

    #[error("tensor shape mismatch: {0}")]
    Shape(String),

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    #[error("free product not numerically representable: semicircular symbol {0} present")]
    SemicircularInNumeric(String),

    #[error("numeric evaluation error: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
