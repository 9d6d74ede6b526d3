use thiserror::Error;

/// Errors surfaced by algebra, representation, and field-theory operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mismatched hbar: {0} vs {1}")]
    HbarMismatch(f64, f64),

    #[error("element does not live at hbar = 0 (found hbar = {0})")]
    NotClassical(f64),

    #[error("exact norm is only defined for single-term elements ({0} terms present)")]
    MultiTerm(usize),

    #[error("duplicate test-function keys after canonicalization")]
    DuplicateKeys,

    #[error("complex structure incompatible with the symplectic form: {0}")]
    IncompatibleStructure(String),

    #[error("fractional shift of {0} grid units requested in strict mode")]
    FractionalShift(f64),

    #[error("coherent-state center too close to the grid boundary (tail mass {0:.3e})")]
    BoundaryTail(f64),

    #[error("quadrature window too small: resolution-of-identity residual {0:.3e}")]
    QuadratureWindow(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("basis not orthonormal: worst Gram deviation {0:.3e}")]
    NonOrthonormalBasis(f64),

    #[error("pair/condition combination not covered by the closed-form residual table: {0}")]
    UnsupportedPair(String),

    #[error("mass must be positive (got {0})")]
    NonPositiveMass(f64),

    #[error("discretized operator is not positive definite (min eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
