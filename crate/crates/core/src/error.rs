use thiserror::Error;

use crate::detect::EventKind;

/// Failures of the dense linear-algebra kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("vector of length {got} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A pivot fell below `1e-14 * max|A|`. Callers decide whether a
    /// vanishing determinant is a finding or a failure.
    #[error("matrix is singular to working precision (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("bialternate product needs n >= 2, got n = {0}")]
    DimensionTooSmall(usize),
    #[error("eigensolver supports n <= 64, got n = {0}")]
    TooLarge(usize),
}

/// Errors raised by systems, continuation and the locators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state vector has length {got}, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("domain violation: {what} (value {value:e})")]
    DomainViolation { what: &'static str, value: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid settings: {0}")]
    InvalidSettings(&'static str),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Newton corrector diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("Jacobian D_uF is singular at the seed point; perturb the seed parameter")]
    SingularJacobian,
    #[error("bordered continuation system is singular")]
    SingularBorderedSystem,
    #[error("extended-system Jacobian is singular (normalization index {index})")]
    SingularExtendedJacobian { index: usize },
    #[error("trajectory blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("expected a {expected:?} event, got {got:?}")]
    WrongEventKind { expected: EventKind, got: EventKind },
}
