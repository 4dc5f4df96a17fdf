//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported matrix dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("non-finite entry")]
    NonFinite,

    #[error("matrix is not unitary: residual {residual:.3e} exceeds tol {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("matrix is not in SL(2,C): {0}")]
    NotSl2(String),

    #[error("value does not lie on the unit circle: | |z| - 1 | = {0:.3e}")]
    NotUnitModulus(f64),

    #[error("matrix is not diagonalizable over the unit circle")]
    NotDiagonalizable,

    #[error("unsupported group or rank for this operation: {0}")]
    UnsupportedGroup(String),

    #[error("group tag does not match matrices: {0}")]
    GroupMismatch(String),

    #[error("representation violates the defining relation: residual {0:.3e}")]
    RelationViolated(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("empty stratum: {0}")]
    EmptyStratum(String),

    #[error("invalid chain complex: {0}")]
    InvalidComplex(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
