use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown type label: {0}")]
    UnknownTypeLabel(String),

    #[error("weight is not dominant integral: {0}")]
    NonDominantWeight(String),

    #[error("matrix modules are only realized for the A series")]
    NonASeriesModule,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("marked points must be pairwise distinct")]
    CoincidentPoints,

    #[error("commutativity gate failed: {0}")]
    CommutativityGate(String),

    #[error("shift element is not regular")]
    NonRegularShift,

    #[error("operator is not self-adjoint for the given form: {0}")]
    NotSelfAdjoint(String),

    #[error("operators are not simultaneously diagonalizable within tolerance")]
    NotSimultaneouslyDiagonalizable,

    #[error("eigenvalue clustering is ambiguous: {0}")]
    ClusteringAmbiguity(String),

    #[error("element does not centralize the principal nilpotent")]
    NotInCentralizer,

    #[error("path passes within clearance of a singularity: {0}")]
    PathClearance(String),

    #[error("step size underflow during transport at parameter {0}")]
    StepUnderflow(f64),

    #[error("non-finite values during transport")]
    NonFiniteState,

    #[error("normal form needs a deeper shearing step than supported: {0}")]
    ShearingUnsupported(String),

    #[error("no exact square root in the scalar field: {0}")]
    ExactSqrtUnavailable(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
