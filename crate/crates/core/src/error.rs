//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel evaluated at coincident points")]
    Singularity,

    /// Krylov iteration ran out of iterations before reaching tolerance.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    #[error("point ({0}, {1}, {2}) lies inside the contrast support")]
    InsideSupport(f64, f64, f64),

    #[error("no stable band found ({0}); pass the band explicitly")]
    BandNotFound(String),

    /// Normalizing field too small at retained samples.
    #[error("|g(x, k*)| below {threshold:.1e} at {count} samples, first at (x, y) = ({x}, {y})")]
    DivisionGuard {
        threshold: f64,
        count: usize,
        x: f64,
        y: f64,
    },

    #[error("total field magnitude below 1e-12 at {count} grid nodes")]
    VanishingField { count: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unit tag mismatch: expected \"{expected}\", found \"{found}\"")]
    Unit { expected: String, found: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
