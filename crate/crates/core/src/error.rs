use thiserror::Error;

/// Errors raised by geometry, lamination and extension routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("box is not normalized: Liouville measure {observed} (expected 1)")]
    BoxNormalization { observed: f64 },

    #[error("box map inconsistency: fourth corner misses its target by {mismatch:e}")]
    BoxInconsistency { mismatch: f64 },

    #[error("expected a hyperbolic map, got {0:?}")]
    Classification(crate::hyperbolic::MapKind),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("leaves {first} and {second} cross")]
    CrossingLeaves { first: usize, second: usize },

    #[error("leaf {index} has non-positive or non-finite weight {weight}")]
    BadWeight { index: usize, weight: f64 },

    #[error("leaf {index} has coincident endpoints")]
    DegenerateLeaf { index: usize },

    #[error("geodesics cross, distance undefined")]
    CrossingGeodesics,

    #[error("scale factor must be non-negative, got {0}")]
    NegativeScale(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("barycenter iteration did not converge after {iterations} steps (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("numerical breakdown: Beltrami coefficient magnitude {magnitude} >= 1")]
    NumericalBreakdown { magnitude: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of an iterative or finite-difference numerical step,
    /// as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::NumericalBreakdown { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
