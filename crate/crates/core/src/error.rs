use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator must have at least one row")]
    EmptyOperator,

    #[error("entry count {len} is not a perfect square")]
    NotSquare { len: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("operator is not Hermitian (max |A - A^dag| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not unitary (max |U^dag U - I| = {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("density matrix has negative eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("basis is not orthonormal (max |<a|b> - delta_ab| = {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("basis has {len} vectors but the space has dimension {dim}")]
    IncompleteBasis { len: usize, dim: usize },

    #[error("basis does not diagonalize the state (max off-diagonal {defect:e})")]
    BasisDoesNotDiagonalize { defect: f64 },

    #[error(
        "state has a degenerate populated eigenvalue {eigenvalue}; pass its eigenbasis explicitly"
    )]
    DegenerateState { eigenvalue: f64 },

    #[error(
        "initial state does not commute with G_0 (max |[G_0, rho]| = {defect:e}); use the QBN path"
    )]
    NonCommuting { defect: f64 },

    #[error("Kraus set is incomplete (defect {defect:e})")]
    Incomplete { defect: f64 },

    #[error("Kraus set must contain at least one operator")]
    EmptyKrausSet,

    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),

    #[error("negative outcome probability {prob:e} for label {label:?}")]
    NegativeProbability { label: String, prob: f64 },

    #[error("ancilla preparation index {index} out of range for dimension {dim}")]
    PrepOutOfRange { index: usize, dim: usize },

    #[error("propagation time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("propagator needs at least one step")]
    ZeroSteps,

    #[error("no predictor value for outcome {0:?}")]
    MissingOutcome(String),

    #[error("no heat entry for outcome {0:?}")]
    MissingHeat(String),

    #[error("label component {index} out of range (labels have {components} components)")]
    SelectorOutOfRange { index: usize, components: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
