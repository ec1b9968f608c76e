use thiserror::Error;

/// Failures reported by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Bradlow condition violated: R^2 = {r_squared} must exceed N = {n}")]
    BradlowViolation { n: usize, r_squared: f64 },

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("vortices {first} and {second} are closer ({distance:.3e}) than the resolvable separation {threshold:.3e}")]
    CoincidentZeros {
        first: usize,
        second: usize,
        distance: f64,
        threshold: f64,
    },

    #[error("spectral cutoff too small: {levels} levels, need at least {required}")]
    CutoffTooSmall { levels: usize, required: usize },

    #[error("heat-trace fit failed: relative residual {residual:.3e} exceeds {threshold:.3e}")]
    FitFailure { residual: f64, threshold: f64 },

    #[error("chart data inconsistent on the overlap: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    ChartInconsistency { deviation: f64, tolerance: f64 },

    #[error("homogeneous coordinates must not all vanish")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;
