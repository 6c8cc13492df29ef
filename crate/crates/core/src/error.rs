use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum XtfcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("derivative order {order} exceeds the supported maximum of {max}")]
    DerivativeOrder { order: u32, max: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("constraints along axis {axis} are degenerate (singular switching matrix)")]
    ConstraintDegeneracy { axis: usize },

    #[error("constraint data disagree at the intersection of axes {axes:?} (difference {difference:e})")]
    InconsistentConstraints { axes: Vec<usize>, difference: f64 },

    #[error("constraint data cannot supply derivative {orders:?}")]
    MissingDerivative { orders: Vec<u32> },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("svd failed to converge")]
    SvdNoConvergence,

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("point {point:?} lies outside the problem domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for XtfcError {
    fn from(e: std::io::Error) -> Self {
        XtfcError::Io(e.to_string())
    }
}

pub type Result<T, E = XtfcError> = std::result::Result<T, E>;
