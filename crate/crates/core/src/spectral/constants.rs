use nalgebra::SymmetricEigen;
use serde::Serialize;

use super::eigen::eigenvalues;
use super::problem::CMat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConstants {
    pub a_min: f64,
    pub a_max: f64,
    pub a_0: f64,
    pub a_1: f64,
    pub a_2: f64,
    pub b_0: f64,
    pub beta_a: f64,
    pub beta_b: f64,
}

/// Constants that only involve `B`; defined for every input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BConstants {
    pub b_0: f64,
    pub beta_b: f64,
}

/// Smallest eigenvalue of the Hermitian part `(M + M^*) / 2`.
pub fn hermitian_part_min(m: &CMat) -> f64 {
    let h = (m + m.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.min()
}

/// `min Re sigma(M)`.
pub fn spectral_abscissa_min(m: &CMat) -> f64 {
    eigenvalues(m).iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

pub fn b_constants(b: &CMat) -> BConstants {
    BConstants { b_0: spectral_abscissa_min(b), beta_b: -hermitian_part_min(b) }
}

/// All constants of the pencil. Fails when `min Re sigma(A) <= 0`, since then
/// `a_0` is not positive and `a_1`, `a_2` are meaningless.
pub fn spectral_constants(a: &CMat, b: &CMat) -> Result<SpectralConstants> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Dimension(format!("A is {:?}, B is {:?}", a.shape(), b.shape())));
    }
    let lam = eigenvalues(a);
    let a_0 = lam.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if !(a_0 > 0.0) {
        return Err(Error::Assumption {
            condition: "A2",
            detail: format!("min Re sigma(A) = {a_0:.6e} is not positive"),
        });
    }
    let a_max = lam.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // rho(A^{-1}) = 1 / min |lambda|.
    let a_min = lam.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let BConstants { b_0, beta_b } = b_constants(b);
    Ok(SpectralConstants {
        a_min,
        a_max,
        a_0,
        a_1: a_max * a_max / (a_min * a_0),
        a_2: 4.0 * a_max * a_max / a_0,
        b_0,
        beta_a: hermitian_part_min(a),
        beta_b,
    })
}
