use thiserror::Error;

/// Errors produced by the square-permutation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("pattern of size {pattern} longer than permutation of size {size}")]
    PatternTooLong { pattern: usize, size: usize },

    #[error("permutation is not square")]
    NotSquare,

    #[error("size {n} outside supported range: {reason}")]
    SizeOutOfRange { n: usize, reason: &'static str },

    #[error("exact counting needs {work} steps, above the bound {bound}; pass a sample count")]
    WorkBoundExceeded { work: u128, bound: u128 },

    #[error("invalid anchored pair: {0}")]
    InvalidPair(String),

    #[error("anchored pair is not good (X_1 = X_n = X_z0 = D and Y_1 = Y_n = L)")]
    NotGood,

    #[error("label matching failed: {0}")]
    Matching(String),

    #[error("sampler gave up after {attempts} attempts at n = {n}")]
    AttemptCapExceeded { n: usize, attempts: u64 },

    #[error("anchor z0 = {z0} violates {constraint} at n = {n}")]
    AnchorConstraint {
        n: usize,
        z0: usize,
        constraint: String,
    },

    #[error("degenerate point family: {0}")]
    DegenerateFamily(String),

    #[error("even pattern size {0}; odd size >= 3 required")]
    EvenSize(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
