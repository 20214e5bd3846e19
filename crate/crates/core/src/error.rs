use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("no inverse of {value} modulo {modulus}")]
    NoInverse { value: u64, modulus: u64 },
    #[error("{0} is not a prime below 2^62")]
    NotPrime(u64),
    #[error("order {order} unavailable modulo {modulus}")]
    OrderUnavailable { order: u128, modulus: u64 },
    #[error(
        "insufficient primes: found {found} with a {product_bits}-bit product, \
         need a {target_bits}-bit product"
    )]
    InsufficientPrimes { found: usize, product_bits: u64, target_bits: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("degree overflow: exponent {exponent} on axis {axis} does not fit length {len}")]
    DegreeOverflow { axis: usize, exponent: u32, len: usize },
    #[error("monomial has {got} exponents, expected {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("unsupported transform length {len} (max {max})")]
    UnsupportedLength { len: usize, max: usize },
    #[error("shape mismatch: {0}")]
    Mismatch(String),
    #[error("duplicate prime {0} in basis")]
    DuplicatePrime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("invalid matrix: {0}")]
    InvalidInput(String),
    #[error("planning failed: {0}")]
    Planning(ArithError),
    #[error("checkpoint invalid: {0}")]
    CheckpointInvalid(String),
    #[error("stale workspace: {0}")]
    StaleWorkspace(String),
    #[error("interrupted after {completed} units")]
    Interrupted { completed: usize },
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl PipelineError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.into(), source }
    }
}
