use thiserror::Error;

use crate::integrate::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the model is defined
    /// (non-positive price level or output, time outside a schedule, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// NaN or infinite input.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("no positive price level clears demand (Ystar = {y_star})")]
    NoPositiveRoot { y_star: f64 },

    #[error("{what} did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Durand-Kerner gave up; the best iterate is kept for diagnostics.
    #[error("polynomial roots did not converge after {iterations} iterations")]
    RootsNoConvergence {
        iterations: usize,
        best: Vec<num_complex::Complex64>,
    },

    #[error("base point is not an equilibrium (field inf-norm {residual:e})")]
    NotEquilibrium { residual: f64 },

    #[error("step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },

    #[error("trajectory truncated at t = {t} after {halvings} step halvings")]
    TrajectoryTruncated {
        t: f64,
        halvings: u32,
        partial: Box<Trajectory>,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoPositiveRoot { .. }
                | Error::NoConvergence { .. }
                | Error::RootsNoConvergence { .. }
                | Error::NotEquilibrium { .. }
                | Error::StepRejected { .. }
                | Error::TrajectoryTruncated { .. }
        )
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{name} = {value}")))
    }
}
