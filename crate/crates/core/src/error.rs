use thiserror::Error;

/// Errors raised by the geometric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("block {block} has dimension {got}, expected {expected}")]
    BlockDimension {
        block: usize,
        expected: usize,
        got: usize,
    },

    #[error("element is not self-adjoint (deviation {0:e})")]
    NotSelfAdjoint(f64),

    #[error("element is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("positive functional vanishes identically")]
    ZeroFunctional,

    #[error("state does not have unit trace (trace {0})")]
    NotUnitTrace(f64),

    #[error("tangent vector at a state must be traceless (trace {0:e})")]
    NotTraceless(f64),

    #[error("tangent vector carries mass {mass:e} on the kernel block of its base point")]
    IncompatibleTangent { mass: f64 },

    #[error("tangent component {index} = {value:e} lies outside the support of the distribution")]
    SupportMismatch { index: usize, value: f64 },

    #[error("operation requires an Abelian algebra")]
    NotAbelian,

    #[error("state is not faithful (min eigenvalue {0:e})")]
    NotFaithful(f64),

    #[error("degenerate plane (normalization {0:e})")]
    DegeneratePlane(f64),

    #[error("direction is zero at the base point")]
    ZeroDirection,

    #[error("operator is not in the commutant (residual {0:e})")]
    NotInCommutant(f64),

    #[error("operator is not skew-adjoint (deviation {0:e})")]
    NotSkewAdjoint(f64),

    #[error("vector dimension {got} does not match the GNS space dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("base point mismatch (deviation {0:e})")]
    BaseMismatch(f64),

    #[error("finite-difference step {0:e} is below the cancellation guard 1e-6")]
    StepTooSmall(f64),
}

impl Error {
    /// True for errors that signal malformed or out-of-domain input rather
    /// than a failure inside a numerical routine.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidShape(_)
                | Error::ShapeMismatch { .. }
                | Error::BlockDimension { .. }
                | Error::NotSelfAdjoint(_)
                | Error::NotPositive(_)
                | Error::ZeroFunctional
                | Error::NotUnitTrace(_)
                | Error::NotTraceless(_)
                | Error::NotAbelian
                | Error::ZeroDirection
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
