use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0:?} is already present in the configuration")]
    DuplicatePoint(Vec<f64>),
    #[error("coincident point {0:?}: evaluation point lies on an existing point")]
    CoincidentPoint(Vec<f64>),
    #[error("point {0:?} has a non-finite coordinate")]
    NonFinitePoint(Vec<f64>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("plus and minus components share the point {0:?}")]
    NotDisjoint(Vec<f64>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "boundary configuration is infeasible (hard-core violation or point inside the window)"
    )]
    InfeasibleBoundary,
    #[error("model has a negative interaction amplitude; the e^-U <= 1 envelope does not hold")]
    NotNonnegativeModel,
    #[error("test function '{id}' has arity {got}, expected {expected}")]
    WrongArity {
        id: String,
        expected: &'static str,
        got: &'static str,
    },
    #[error("subwindow is not contained in the simulation window")]
    SubwindowNotContained,
    #[error("not enough samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
