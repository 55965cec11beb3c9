//! Heat kernel of the operator and its moments.
//!
//! In the joint eigenbasis the kernel is diagonal with scalar entries
//! `c_j exp(-alpha_j r^2)`, where `c_j = (4 pi t lambda_j)^{-d/2} e^{-mu_j t}`,
//! `alpha_j = 1 / (4 t lambda_j)`, and `r = |e^{tS} x - xi|`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss_legendre, trapezoid_symmetric, Rule};
use crate::spectral::{matrix_exp, norm2, rotation, CMat, EigenStructure, OuProblem, SpectralConstants};

/// Quadrature radius in units of the slowest Gaussian width `sqrt(t a_max^2 / a_0)`.
pub const DEFAULT_RADIUS_FACTOR: f64 = 12.0;
pub const MIN_RADIUS_FACTOR: f64 = 8.0;

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be positive and finite, got {t}")))
    }
}

fn check_accretive(eig: &EigenStructure) -> Result<()> {
    match eig.lam_a.iter().find(|l| l.re <= 0.0) {
        Some(l) => Err(Error::Assumption {
            condition: "A2",
            detail: format!("eigenvalue {l} of A has non-positive real part"),
        }),
        None => Ok(()),
    }
}

fn check_point(d: usize, v: &[f64], name: &str) -> Result<()> {
    if v.len() == d {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{name} has length {}, expected {d}", v.len())))
    }
}

/// Per-eigencomponent `(c_j, alpha_j)`.
pub fn scalar_factors(eig: &EigenStructure, d: usize, t: f64) -> Vec<(Complex64, Complex64)> {
    eig.lam_a
        .iter()
        .zip(&eig.lam_b)
        .map(|(&la, &lb)| {
            let scale = (la * (4.0 * std::f64::consts::PI * t)).powf(-(d as f64) / 2.0);
            (scale * (-lb * t).exp(), 1.0 / (la * (4.0 * t)))
        })
        .collect()
}

/// Kernel as a function of the squared distance `r2`.
pub fn kernel_from_r2(eig: &EigenStructure, d: usize, r2: f64, t: f64) -> CMat {
    let f = scalar_factors(eig, d, t);
    eig.compose(|j| f[j].0 * (-f[j].1 * r2).exp())
}

fn sq_dist_rotated(problem: &OuProblem, x: &[f64], xi: &[f64], t: f64) -> (Vec<f64>, f64) {
    let r = rotation(problem.s(), t);
    let d = problem.dim();
    let u: Vec<f64> = (0..d).map(|i| (0..d).map(|k| r[(i, k)] * x[k]).sum::<f64>() - xi[i]).collect();
    let r2 = u.iter().map(|v| v * v).sum();
    (u, r2)
}

/// `H(x, xi, t)`.
pub fn heat_kernel(problem: &OuProblem, eig: &EigenStructure, x: &[f64], xi: &[f64], t: f64) -> Result<CMat> {
    check_time(t)?;
    check_accretive(eig)?;
    let d = problem.dim();
    check_point(d, x, "x")?;
    check_point(d, xi, "xi")?;
    let (_, r2) = sq_dist_rotated(problem, x, xi, t);
    Ok(kernel_from_r2(eig, d, r2, t))
}

/// `K(psi, t) = H(x, e^{tS} x - psi, t)`, which does not depend on `x`.
pub fn convolution_kernel(problem: &OuProblem, eig: &EigenStructure, psi: &[f64], t: f64) -> Result<CMat> {
    check_time(t)?;
    check_accretive(eig)?;
    let d = problem.dim();
    check_point(d, psi, "psi")?;
    Ok(kernel_from_r2(eig, d, psi.iter().map(|v| v * v).sum(), t))
}

/// The operator applied to `H(., xi, t)` in the `x` variable, evaluated analytically.
pub fn heat_kernel_generator(problem: &OuProblem, eig: &EigenStructure, x: &[f64], xi: &[f64], t: f64) -> Result<CMat> {
    check_time(t)?;
    check_accretive(eig)?;
    let d = problem.dim();
    check_point(d, x, "x")?;
    check_point(d, xi, "xi")?;
    let (u, r2) = sq_dist_rotated(problem, x, xi, t);
    let r = rotation(problem.s(), t);
    let s = problem.s();
    // <Sx, R^T u>
    let sx: Vec<f64> = (0..d).map(|i| (0..d).map(|k| s[(i, k)] * x[k]).sum()).collect();
    let rt_u: Vec<f64> = (0..d).map(|i| (0..d).map(|k| r[(k, i)] * u[k]).sum()).collect();
    let drift: f64 = sx.iter().zip(&rt_u).map(|(a, b)| a * b).sum();
    let f = scalar_factors(eig, d, t);
    Ok(eig.compose(|j| {
        let (c, alpha) = f[j];
        let h = c * (-alpha * r2).exp();
        let lap = (alpha * alpha * 4.0 * r2 - alpha * 2.0 * d as f64) * h;
        eig.lam_a[j] * lap - alpha * 2.0 * drift * h - eig.lam_b[j] * h
    }))
}

/// `kappa(Y) (4 pi t a_min)^{-d/2} e^{-b_0 t} exp(-a_0 r2 / (4 t a_max^2))`.
pub fn envelope(consts: &SpectralConstants, kappa_y: f64, d: usize, r2: f64, t: f64) -> f64 {
    kappa_y
        * (4.0 * std::f64::consts::PI * t * consts.a_min).powf(-(d as f64) / 2.0)
        * (-consts.b_0 * t).exp()
        * (-consts.a_0 * r2 / (4.0 * t * consts.a_max * consts.a_max)).exp()
}

/// Quadrature settings for moment integrals. `None` picks the defaults.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct MomentQuad {
    pub radius: Option<f64>,
    pub nodes_per_axis: Option<usize>,
}

/// Width scale `sqrt(t a_max^2 / a_0)` of the slowest-decaying component.
pub fn decay_width(eig: &EigenStructure, t: f64) -> f64 {
    let a_max = eig.lam_a.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let a_0 = eig.lam_a.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
    (t * a_max * a_max / a_0).sqrt()
}

fn default_nodes(eig: &EigenStructure) -> usize {
    let a_max = eig.lam_a.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let a_0 = eig.lam_a.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
    // Keeps the half-resolution comparison rule free of aliasing as well.
    let n = ((96.0 * a_max / a_0).ceil() as usize).max(96);
    n + n % 2
}

fn resolve_radius(eig: &EigenStructure, t: f64, radius: Option<f64>) -> Result<f64> {
    let width = decay_width(eig, t);
    let required = MIN_RADIUS_FACTOR * width;
    let radius = radius.unwrap_or(DEFAULT_RADIUS_FACTOR * width);
    if radius < required {
        return Err(Error::QuadratureRadius { radius, required });
    }
    Ok(radius)
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentEntry {
    /// Coordinate indices of the monomial (empty for `k = 0`).
    pub index: Vec<usize>,
    #[serde(skip)]
    pub value: CMat,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentData {
    pub k: usize,
    pub t: f64,
    pub radius: f64,
    pub nodes_per_axis: usize,
    pub entries: Vec<MomentEntry>,
    /// Largest difference against the same rule at half resolution.
    pub error_estimate: f64,
}

fn monomials(d: usize, k: usize) -> Vec<Vec<usize>> {
    match k {
        0 => vec![vec![]],
        1 => (0..d).map(|i| vec![i]).collect(),
        _ => (0..d).flat_map(|i| (0..d).map(move |j| vec![i, j])).collect(),
    }
}

fn tensor_moments(eig: &EigenStructure, d: usize, t: f64, rule: &Rule, index_sets: &[Vec<usize>]) -> Vec<CMat> {
    let f = scalar_factors(eig, d, t);
    // One-dimensional integrals of x^m exp(-alpha x^2), m = 0, 1, 2, per component.
    let one_d: Vec<[Complex64; 3]> = f
        .iter()
        .map(|&(_, alpha)| {
            let mut acc = [Complex64::new(0.0, 0.0); 3];
            for (x, w) in rule.iter() {
                let g = (-alpha * x * x).exp() * w;
                acc[0] += g;
                acc[1] += g * x;
                acc[2] += g * x * x;
            }
            acc
        })
        .collect();
    index_sets
        .iter()
        .map(|idx| {
            let mut powers = vec![0usize; d];
            for &i in idx {
                powers[i] += 1;
            }
            eig.compose(|j| powers.iter().fold(f[j].0, |acc, &m| acc * one_d[j][m]))
        })
        .collect()
}

/// Moments `int K(psi, t) psi^alpha dpsi` for all monomials of degree `k <= 2`.
pub fn moment_matrix(
    problem: &OuProblem,
    eig: &EigenStructure,
    k: usize,
    t: f64,
    quad: &MomentQuad,
) -> Result<MomentData> {
    check_time(t)?;
    check_accretive(eig)?;
    if k > 2 {
        return Err(Error::InvalidParameter(format!("moment order must be 0, 1 or 2, got {k}")));
    }
    let d = problem.dim();
    let radius = resolve_radius(eig, t, quad.radius)?;
    let nodes = quad.nodes_per_axis.unwrap_or_else(|| default_nodes(eig));
    if nodes < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 nodes per axis, got {nodes}")));
    }
    let index_sets = monomials(d, k);
    let fine = tensor_moments(eig, d, t, &trapezoid_symmetric(radius, nodes), &index_sets);
    let coarse = tensor_moments(eig, d, t, &trapezoid_symmetric(radius, nodes / 2), &index_sets);
    let error_estimate = fine.iter().zip(&coarse).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(MomentData {
        k,
        t,
        radius,
        nodes_per_axis: nodes,
        entries: index_sets.into_iter().zip(fine).map(|(index, value)| MomentEntry { index, value }).collect(),
        error_estimate,
    })
}

/// Closed-form moments: `e^{-Bt}`, `0`, and `2t e^{-Bt} A delta_ij`.
pub fn analytic_moment(problem: &OuProblem, index: &[usize], t: f64) -> CMat {
    let n = problem.size();
    let decay = matrix_exp(problem.b(), -t);
    match index {
        [] => decay,
        [_] => CMat::zeros(n, n),
        [i, j] if i == j => problem.a() * decay * Complex64::new(2.0 * t, 0.0),
        _ => CMat::zeros(n, n),
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct AbsQuad {
    pub radius: Option<f64>,
    pub panels: Option<usize>,
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentAbs {
    pub k: usize,
    pub t: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / ln_gamma(d as f64 / 2.0).exp()
}

fn radial_abs_moment(eig: &EigenStructure, d: usize, k: usize, t: f64, rule: &Rule) -> f64 {
    let power = (k + d - 1) as i32;
    let sum: f64 = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&r, &w)| w * norm2(&kernel_from_r2(eig, d, r * r, t)) * r.powi(power))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    sphere_area(d) * sum
}

/// `int |K(psi, t)|_2 |psi|^k dpsi`, through the radial reduction (the kernel
/// depends on `|psi|` only).
pub fn moment_abs(problem: &OuProblem, eig: &EigenStructure, k: usize, t: f64, quad: &AbsQuad) -> Result<MomentAbs> {
    check_time(t)?;
    check_accretive(eig)?;
    let d = problem.dim();
    let radius = resolve_radius(eig, t, quad.radius)?;
    // The polynomial weight moves mass outward; widen accordingly.
    let radius = radius * (1.0 + k as f64 / 8.0);
    let panels = quad.panels.unwrap_or(256).max(2);
    let order = quad.order.unwrap_or(16);
    let breaks = |p: usize| -> Vec<f64> { (0..=p).map(|i| radius * i as f64 / p as f64).collect() };
    let fine = radial_abs_moment(eig, d, k, t, &composite_gauss_legendre(&breaks(panels), order));
    let coarse = radial_abs_moment(eig, d, k, t, &composite_gauss_legendre(&breaks(panels / 2), order));
    Ok(MomentAbs { k, t, value: fine, error_estimate: (fine - coarse).abs() })
}

/// `kappa(Y) a_1^{d/2} e^{-b_0 t} a_2^{k/2} Gamma((d+k)/2) / Gamma(d/2) t^{k/2}`.
pub fn moment_bound(consts: &SpectralConstants, kappa_y: f64, d: usize, k: usize, t: f64) -> f64 {
    let (d, k) = (d as f64, k as f64);
    kappa_y
        * consts.a_1.powf(d / 2.0)
        * (-consts.b_0 * t).exp()
        * consts.a_2.powf(k / 2.0)
        * (ln_gamma((d + k) / 2.0) - ln_gamma(d / 2.0)).exp()
        * t.powf(k / 2.0)
}
