use thiserror::Error;

/// Errors raised by the algebra, geometry and solver modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected} bits, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("monomials belong to different alphabets ({left} vs {right} generators)")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("the swap action is only defined on G_n(R^2n); got n = {n}, k = {k}")]
    UnsupportedAction { n: usize, k: usize },

    #[error("degree {degree} is outside the admissible range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("wreath elements come from different contexts")]
    ContextMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
