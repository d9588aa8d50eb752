use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A denominator in the absolute/Einstein synchronization relations
    /// vanished. Signals superluminal relative motion, where the two
    /// synchronizations stop being equivalent.
    #[error("synchronization singularity: denominator {denominator:e}")]
    SynchronizationSingularity { denominator: f64 },

    #[error("expected a unit vector, got norm {norm}")]
    NonUnitVector { norm: f64 },

    #[error("matrix is not a proper rotation (orthogonality defect {orthogonality:e}, det {det})")]
    NotARotation { orthogonality: f64, det: f64 },

    #[error("relative four-velocity must have positive time component, got {0}")]
    NonPositiveTimeComponent(f64),

    #[error("transform product is not a pure spatial rotation (deviation {deviation:e})")]
    NotBlockRotation { deviation: f64 },

    #[error("transform source frame does not match the supplied four-velocity")]
    FrameMismatch,

    #[error("spin must be a non-negative multiple of 1/2, got {0}")]
    InvalidSpin(f64),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("high-velocity formula is singular for antipodal directions (1 + nA.nB = {0:e})")]
    AntipodalDirections(f64),

    #[error("preferred-frame direction undefined for a frame at rest in it")]
    UndefinedDirection,

    #[error("detector regions overlap after transport ({cells} shared cells)")]
    RegionOverlap { cells: usize },

    #[error("spatial block of the transform is singular")]
    SingularTransform,

    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("{0} is not an eigenvalue of the spin projection")]
    InvalidEigenvalue(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
