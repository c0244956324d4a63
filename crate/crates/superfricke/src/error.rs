use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalar mode mismatch: cannot mix exact and float values")]
    ModeMismatch,
    #[error("generator count mismatch: {0} vs {1}")]
    GeneratorMismatch(u8, u8),
    #[error("generator count {0} outside 1..=16")]
    GeneratorCount(usize),
    #[error("element has zero body and is not invertible")]
    ZeroBody,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("exactness error: {0}")]
    Exactness(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("determinant is not 1: {0}")]
    Determinant(String),
    #[error("A is central (A = +-I); no triangular normal form of this shape")]
    Central,
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("root has singular derivative at body level")]
    SingularRoot,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("matching needs an even number of vectors, got {0}")]
    OddCount(usize),
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("syntax error at index {position}: unexpected {found:?}")]
    Syntax { position: usize, found: char },
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
