use serde::Serialize;

use super::grid::{GridField, DECAY_TOL};
use super::stencil::{derivative, mixed_derivative};
use crate::error::{Error, Result};

/// `(sum_i |v(x_i)|^p h^d)^{1/p}` with the Euclidean norm on `C^N`.
pub fn lp_norm(v: &GridField, p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "lp_norm needs 1 <= p < inf, got {p}");
    let sum: f64 = (0..v.spec.len()).map(|i| v.node_norm(i).powf(p)).sum();
    (sum * v.spec.cell_volume()).powf(1.0 / p)
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevNorms {
    pub k: usize,
    pub p: f64,
    /// Full `W^{k,p}` norm over all multi-indices of order at most `k`.
    pub norm: f64,
    /// `|v|_{W^{1,p}} = (sum_j |D_j v|_p^p)^{1/p}`.
    pub seminorm: f64,
    /// `(sum_{|beta| = 2} |D^beta v|_p^p)^{1/p}` when `k = 2`.
    pub second_seminorm: Option<f64>,
    #[serde(skip)]
    pub gradient: Vec<GridField>,
}

/// Sobolev norms with the default boundary-decay requirement.
pub fn sobolev_norms(v: &GridField, p: f64, k: usize) -> Result<SobolevNorms> {
    sobolev_norms_with(v, p, k, Some(DECAY_TOL))
}

/// As [`sobolev_norms`]; `decay_tol = None` skips the decay check, which is
/// only sound for fields that are genuinely periodic on the box.
pub fn sobolev_norms_with(v: &GridField, p: f64, k: usize, decay_tol: Option<f64>) -> Result<SobolevNorms> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!("Sobolev order must be 1 or 2, got {k}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent must satisfy 1 <= p < inf, got {p}")));
    }
    if let Some(tol) = decay_tol {
        v.require_decay(tol)?;
    }
    let d = v.spec.d;
    let base = lp_norm(v, p).powf(p);
    let gradient: Vec<GridField> = (0..d).map(|j| derivative(v, j)).collect();
    let first: f64 = gradient.iter().map(|g| lp_norm(g, p).powf(p)).sum();
    let second = (k == 2).then(|| {
        let mut acc = 0.0;
        for i in 0..d {
            for j in i..d {
                acc += lp_norm(&mixed_derivative(v, i, j), p).powf(p);
            }
        }
        acc
    });
    Ok(SobolevNorms {
        k,
        p,
        norm: (base + first + second.unwrap_or(0.0)).powf(1.0 / p),
        seminorm: first.powf(1.0 / p),
        second_seminorm: second.map(|s| s.powf(1.0 / p)),
        gradient,
    })
}
