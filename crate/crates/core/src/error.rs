use thiserror::Error;

use crate::contour::QuadratureResult;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A non-finite value was passed in.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// The (omega, k) pair does not satisfy the dispersion relation.
    #[error("point is not on the dispersion manifold (relative residual {residual:e} > {tolerance:e})")]
    OffManifold { residual: f64, tolerance: f64 },

    /// Quadrature stopped before reaching the requested tolerance. The best
    /// available estimate is attached.
    #[error("quadrature did not converge: best value {}, error estimate {:e} after {} evaluations", .0.value, .0.error_estimate, .0.evaluations)]
    NotConverged(QuadratureResult),

    /// Descent tracing could not make progress.
    #[error("descent trace failed: {0}")]
    Trace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(v: f64, what: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
