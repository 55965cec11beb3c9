//! The weighted integration-by-parts inequality behind the Lp resolvent bounds,
//!
//! ```text
//! -Re int eta conj(v)^T |v|^{p-2} A Lap v
//!   >= (p-1) Re int eta |v|^{p-2} sum_j conj(D_j v)^T A D_j v
//!    + Re int conj(v)^T |v|^{p-2} sum_j D_j eta A D_j v
//!    + (p-2) Re int eta |v|^{p-4} sum_j [Re(conj(D_j v)^T v) conj(v)^T - |v|^2 conj(D_j v)^T] A D_j v,
//! ```
//!
//! evaluated by tensor Gauss-Legendre quadrature with analytic derivatives.
//! For smooth nonvanishing `v` both sides agree; the inequality only becomes
//! strict through zeros of `v` when `p < 2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::SchwartzFunction;
use crate::quadrature::{composite_gauss_legendre, Rule};
use crate::spectral::CMat;

/// `shift + phi(x)`: a Schwartz function lifted away from zero.
#[derive(Debug, Clone)]
pub struct ShiftedField {
    pub shift: Vec<Complex64>,
    pub phi: SchwartzFunction,
}

/// `exp(-|x - c|^2 / (2 w^2))`, nonnegative and smooth.
#[derive(Debug, Clone)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
}

impl Bump {
    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let w2 = self.width * self.width;
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let eta = (-y.iter().map(|v| v * v).sum::<f64>() / (2.0 * w2)).exp();
        (eta, y.iter().map(|v| -v / w2 * eta).collect())
    }
}

/// Tensor Gauss-Legendre on `[-L, L]^d`.
#[derive(Debug, Clone, Copy)]
pub struct BoxDomain {
    pub half_extent: f64,
    pub panels: usize,
    pub order: usize,
}

impl Default for BoxDomain {
    fn default() -> Self {
        Self { half_extent: 8.0, panels: 16, order: 12 }
    }
}

impl BoxDomain {
    fn rule(&self) -> Rule {
        let l = self.half_extent;
        let breaks: Vec<f64> = (0..=self.panels).map(|i| -l + 2.0 * l * i as f64 / self.panels as f64).collect();
        composite_gauss_legendre(&breaks, self.order)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IbpCheck {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Sum of the absolute integrals of all terms.
    pub scale: f64,
    pub tol: f64,
    /// `lhs >= rhs - tol * scale`.
    pub pass: bool,
    /// `|lhs - rhs| <= equality_tol * scale`, asserted for `p >= 2`.
    pub equality: Option<bool>,
}

pub const IBP_TOL: f64 = 1e-6;
pub const IBP_EQUALITY_TOL: f64 = 1e-8;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn mat_vec(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|k| a[(i, k)] * v[k]).sum()).collect()
}

pub fn ibp_inequality_check(
    a: &CMat,
    v: &ShiftedField,
    eta: &Bump,
    omega: &BoxDomain,
    p: f64,
    v_floor: f64,
) -> Result<IbpCheck> {
    let d = v.phi.dim();
    let n = v.shift.len();
    if n != v.phi.components() || a.nrows() != n || a.ncols() != n || eta.center.len() != d {
        return Err(Error::Dimension("shift, function, matrix and bump must agree in size".into()));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent must satisfy 1 < p < inf, got {p}")));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::Dimension(format!("tensor rule supports d = 2 or 3, got {d}")));
    }
    let grads: Vec<SchwartzFunction> = (0..d).map(|j| v.phi.derivative(j)).collect();
    let lap = v.phi.laplacian();
    let rule = omega.rule();
    let m = rule.len();
    let total = m.pow(d as u32);

    // Per node: [lhs, t1, t2, t3] densities times the weight, or the |v| that violated the floor.
    let terms: Vec<std::result::Result<[f64; 4], f64>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![0.0; d];
            let mut w = 1.0;
            let mut rest = flat;
            for axis in (0..d).rev() {
                let i = rest % m;
                rest /= m;
                x[axis] = rule.nodes[i];
                w *= rule.weights[i];
            }
            let val: Vec<Complex64> = v.phi.eval(&x).iter().zip(&v.shift).map(|(f, s)| f + s).collect();
            let mag = dot(&val, &val).re.sqrt();
            if mag < v_floor {
                return Err(mag);
            }
            let (e, de) = eta.eval(&x);
            let pw = mag.powf(p - 2.0);
            let lhs = -e * pw * dot(&val, &mat_vec(a, &lap.eval(&x))).re;
            let (mut t1, mut t2, mut t3) = (0.0, 0.0, 0.0);
            for j in 0..d {
                let dj = grads[j].eval(&x);
                let adj = mat_vec(a, &dj);
                t1 += dot(&dj, &adj).re;
                t2 += de[j] * dot(&val, &adj).re;
                let re_dv = dot(&dj, &val).re;
                t3 += (re_dv * dot(&val, &adj) - mag * mag * dot(&dj, &adj)).re;
            }
            Ok([w * lhs, w * (p - 1.0) * e * pw * t1, w * pw * t2, w * (p - 2.0) * e * mag.powf(p - 4.0) * t3])
        })
        .collect();

    let mut sums = [0.0; 4];
    let mut abs = 0.0;
    for t in terms {
        let t = t.map_err(|mag| Error::Precondition(format!("|v| = {mag:.3e} falls below the floor {v_floor:.3e}")))?;
        for k in 0..4 {
            sums[k] += t[k];
            abs += t[k].abs();
        }
    }
    let lhs = sums[0];
    let rhs = sums[1] + sums[2] + sums[3];
    let scale = abs.max(f64::MIN_POSITIVE);
    Ok(IbpCheck {
        p,
        lhs,
        rhs,
        scale,
        tol: IBP_TOL,
        pass: lhs >= rhs - IBP_TOL * scale,
        equality: (p >= 2.0).then(|| (lhs - rhs).abs() <= IBP_EQUALITY_TOL * scale),
    })
}
