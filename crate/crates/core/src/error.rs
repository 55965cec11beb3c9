use thiserror::Error;

use crate::dissipativity::DissipativityCertificate;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Simultaneous diagonalization failed; `residual` is relative to the matrix norm.
    #[error("A1 violated: pencil is not simultaneously diagonalizable (residual {residual:.3e})")]
    NotDiagonalizable { residual: f64 },

    #[error("assumption {condition} violated: {detail}")]
    Assumption { condition: &'static str, detail: String },

    #[error(
        "no multistart converged (best gamma_A = {:.6e}, gradient norm {:.3e})",
        .incumbent.gamma_a, .incumbent.residual
    )]
    NotConverged { incumbent: Box<DissipativityCertificate> },

    #[error("quadrature radius {radius:.4} is below the required {required:.4}")]
    QuadratureRadius { radius: f64, required: f64 },

    #[error("boundary decay violated: edge/max ratio {ratio:.3e} exceeds {tol:.1e}")]
    BoundaryDecay { ratio: f64, tol: f64 },

    #[error("grid cannot resolve kernel: {detail} (grid spacing must be at most {max_spacing:.4e})")]
    Unresolvable { detail: String, max_spacing: f64 },

    #[error("point {0:?} lies outside the grid domain")]
    OutsideDomain(Vec<f64>),

    #[error("direct quadrature refused for {n} points per axis (limit {limit}); pass the override flag")]
    CostGuard { n: usize, limit: usize },

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
