use thiserror::Error;

/// Errors raised by the linear-algebra kernel, the theory models and the verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("conditioning on an event of probability {0:e}")]
    ZeroProbability(f64),

    #[error("transformations are not coexistent (effect sum exceeds unit by {0:e})")]
    NotCoexistent(f64),

    #[error("scalar {0} outside [0, 1]")]
    ScaleOutOfRange(f64),

    #[error("action is incomplete (effect sum differs from unit by {0:e})")]
    IncompleteAction(f64),

    #[error("effect exceeds the unit effect by {0:e}")]
    EffectExceedsUnit(f64),

    #[error("probe states span rank {rank}, need {needed}")]
    IndeterminateSpan { rank: usize, needed: usize },

    #[error("operation preserves the trace of this state; it is not a selective outcome")]
    NotSelective,

    #[error("both local operations act on the same side")]
    SameSide,

    #[error("wrong side: expected local operation on side {expected}")]
    WrongSide { expected: u8 },

    #[error("observable is not informationally complete (rank {rank} of {needed})")]
    NotInformationallyComplete { rank: usize, needed: usize },

    #[error("model does not expose dual effect coordinates")]
    NoDualCoordinates,

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
