use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("malformed table: {0}")]
    Malformed(String),

    #[error("empty algebra: a carrier of size 0 is not allowed")]
    EmptyAlgebra,

    #[error("closure exceeded cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("algebra has no selectors")]
    MissingSelectors,

    #[error("algebra is not representable: {0}")]
    NotRepresentable(String),

    #[error("union conflict at tuple {tuple:?} for element {element}: {left} vs {right}")]
    UnionConflict {
        element: usize,
        tuple: Vec<usize>,
        left: usize,
        right: usize,
    },

    #[error("representations have different sources")]
    SourceMismatch,

    #[error("invalid determining pair: {0}")]
    InvalidPair(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}
