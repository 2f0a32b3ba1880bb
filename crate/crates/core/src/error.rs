use thiserror::Error;

use crate::sinh_poisson::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error at node ({i}, {j}): {reason}")]
    Domain { i: usize, j: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Newton iteration did not converge after {} iterations (best max residual {:.3e})", .0.iterations, .0.residual_inf)]
    NotConverged(Box<SolveReport>),

    #[error("linear algebra error: {0}")]
    LinearAlgebra(String),

    #[error("step failure at node ({i}, {j}): orthonormality drift {drift:.3e} exceeds {limit:.3e}")]
    StepFailure { i: usize, j: usize, drift: f64, limit: f64 },

    #[error("gate '{name}' failed: measured {value:.3e}, gate {gate:.3e}")]
    Gate { name: String, value: f64, gate: f64 },

    #[error("regularity error: {0}")]
    Regularity(String),

    #[error("principal net violated: defect {defect:.3e} exceeds {tol:.3e}; reparameterize by curvature lines first")]
    PrincipalNet { defect: f64, tol: f64 },

    #[error("umbilic singularity at node ({i}, {j}): |nu1 - nu2| = {gap:.3e}")]
    Umbilic { i: usize, j: usize, gap: f64 },

    #[error("separability check failed: relative variation {variation:.3e} exceeds {tol:.3e}")]
    Separability { variation: f64, tol: f64 },

    #[error("non-minimal input: max |mean curvature| {mean_curvature:.3e} exceeds {tol:.3e}")]
    NonMinimal { mean_curvature: f64, tol: f64 },

    #[error("eigen-direction instability: {0}")]
    Instability(String),

    #[error("degenerate envelope at node ({i}, {j}): W^2 = {w2:.3e}")]
    DegenerateEnvelope { i: usize, j: usize, w2: f64 },

    #[error("conformality precondition violated: defect {defect:.3e} exceeds {tol:.3e}")]
    Conformality { defect: f64, tol: f64 },

    #[error("projection error: {0}")]
    Projection(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
