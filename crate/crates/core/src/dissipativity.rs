//! The quadratic form behind condition (A4) and its minimum over unit pairs.
//!
//! For fixed `w` the form is a real quadratic form in `z`, with minimum over the
//! unit sphere
//!
//! ```text
//! min_z F(z, w) = (p/2) Re<w, Aw> - (|p-2|/2) |Aw|.
//! ```
//!
//! The certifier runs projected gradient descent on the product of spheres and
//! then polishes with that exact inner minimization.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{CMat, CVec, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Multistart,
    Oracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct DissipativityCertificate {
    pub p: f64,
    pub gamma_a: f64,
    pub z_star: Vec<Complex64>,
    pub w_star: Vec<Complex64>,
    pub method: Method,
    pub n_starts: usize,
    /// Norm of the Riemannian gradient of `F` at the minimizer.
    pub residual: f64,
    /// False when the incumbent did not meet the gradient tolerance.
    pub certified: bool,
}

impl DissipativityCertificate {
    pub fn passes(&self) -> bool {
        self.certified && self.gamma_a > 0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub n_starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { n_starts: 64, max_iter: 5000, tol: 1e-10, seed: 0x05ee_d0a4 }
    }
}

fn re_inner(u: &CVec, v: &CVec) -> f64 {
    u.iter().zip(v.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `|z|^2 Re<w,Aw> + (p-2) Re<w,z> Re<z,Aw>`, for arbitrary (not necessarily unit) vectors.
pub fn form_value(a: &CMat, p: f64, z: &CVec, w: &CVec) -> f64 {
    let aw = a * w;
    z.norm_squared() * re_inner(w, &aw) + (p - 2.0) * re_inner(w, z) * re_inner(z, &aw)
}

/// Exact minimum of the form over unit pairs when `N = 1`.
pub fn scalar_gamma(a: Complex64, p: f64) -> f64 {
    0.5 * p * a.re - 0.5 * (p - 2.0).abs() * a.norm()
}

/// Minimum of the form over unit `z` for fixed unit `w`.
pub fn inner_min_value(a: &CMat, p: f64, w: &CVec) -> f64 {
    let aw = a * w;
    0.5 * p * re_inner(w, &aw) - 0.5 * (p - 2.0).abs() * aw.norm()
}

/// A unit `z` attaining [`inner_min_value`] for unit `w`.
fn inner_minimizer(a: &CMat, p: f64, w: &CVec) -> CVec {
    let aw = a * w;
    let norm_aw = aw.norm();
    if norm_aw == 0.0 || p == 2.0 {
        return w.clone();
    }
    let b_hat = aw / Complex64::new(norm_aw, 0.0);
    let z = if p > 2.0 { w - &b_hat } else { w + &b_hat };
    let nz = z.norm();
    if nz < 1e-12 {
        // w and Aw/|Aw| (anti)parallel: every direction orthogonal to w is optimal.
        return orthogonal_unit(w);
    }
    z / Complex64::new(nz, 0.0)
}

/// A unit vector with `Re<w, u> = 0`, the real-orthogonal complement in `C^N`.
fn orthogonal_unit(w: &CVec) -> CVec {
    // i*w is always real-orthogonal to w.
    w * Complex64::new(0.0, 1.0)
}

fn gradients(a: &CMat, p: f64, z: &CVec, w: &CVec) -> (CVec, CVec) {
    let aw = a * w;
    let ah = a.adjoint();
    let ahz = &ah * z;
    let c = re_inner(w, &aw);
    let wz = re_inner(w, z);
    let zaw = re_inner(z, &aw);
    let q = Complex64::new(p - 2.0, 0.0);
    let gz = z * Complex64::new(2.0 * c, 0.0) + (w * Complex64::new(zaw, 0.0) + &aw * Complex64::new(wz, 0.0)) * q;
    let herm_w = &aw + &ah * w;
    let gw = herm_w * Complex64::new(z.norm_squared(), 0.0)
        + (z * Complex64::new(zaw, 0.0) + ahz * Complex64::new(wz, 0.0)) * q;
    (gz, gw)
}

fn tangent(x: &CVec, g: &CVec) -> CVec {
    g - x * Complex64::new(re_inner(x, g), 0.0)
}

fn normalized(v: CVec) -> CVec {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

fn riemannian_grad(a: &CMat, p: f64, z: &CVec, w: &CVec) -> (CVec, CVec) {
    let (gz, gw) = gradients(a, p, z, w);
    (tangent(z, &gz), tangent(w, &gw))
}

fn grad_norm(g: &(CVec, CVec)) -> f64 {
    (g.0.norm_squared() + g.1.norm_squared()).sqrt()
}

#[derive(Debug, Clone)]
struct Run {
    z: CVec,
    w: CVec,
    value: f64,
    residual: f64,
}

/// Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking
/// on the product of unit spheres.
fn descend(a: &CMat, p: f64, mut z: CVec, mut w: CVec, opts: &CertifyOptions) -> Run {
    let mut f = form_value(a, p, &z, &w);
    let mut g = riemannian_grad(a, p, &z, &w);
    let mut gn = grad_norm(&g);
    let mut step = 1.0 / (1.0 + a.norm() * p);
    let mut prev: Option<(CVec, CVec, (CVec, CVec))> = None;

    for _ in 0..opts.max_iter {
        if gn <= opts.tol {
            break;
        }
        if let Some((pz, pw, pg)) = prev.take() {
            let s2 = (&z - &pz).norm_squared() + (&w - &pw).norm_squared();
            let sy = re_inner(&(&z - &pz), &(&g.0 - &pg.0)) + re_inner(&(&w - &pw), &(&g.1 - &pg.1));
            if sy > 0.0 && s2 > 0.0 {
                step = (s2 / sy).clamp(1e-8, 1e3);
            }
        }
        let slack = 8.0 * f64::EPSILON * f.abs().max(1.0);
        let mut accepted = None;
        let mut alpha = step;
        for _ in 0..80 {
            let zn = normalized(&z - &g.0 * Complex64::new(alpha, 0.0));
            let wn = normalized(&w - &g.1 * Complex64::new(alpha, 0.0));
            let fn_ = form_value(a, p, &zn, &wn);
            if fn_ <= f - 1e-4 * alpha * gn * gn + slack {
                accepted = Some((zn, wn, fn_));
                break;
            }
            alpha *= 0.5;
        }
        let Some((zn, wn, fn_)) = accepted else { break };
        let gn_new = riemannian_grad(a, p, &zn, &wn);
        prev = Some((z, w, g));
        z = zn;
        w = wn;
        f = fn_;
        g = gn_new;
        gn = grad_norm(&g);
        step = alpha;
    }
    Run { z, w, value: f, residual: gn }
}

/// Alternates the exact minimization in `z` with descent steps in `w`.
fn polish(a: &CMat, p: f64, run: Run, opts: &CertifyOptions) -> Run {
    if (a * &run.w).norm() < 1e-8 * a.norm().max(f64::MIN_POSITIVE) {
        return run;
    }
    let z = inner_minimizer(a, p, &run.w);
    let candidate = descend(a, p, z, run.w.clone(), opts);
    let z = inner_minimizer(a, p, &candidate.w);
    let value = form_value(a, p, &z, &candidate.w);
    let residual = grad_norm(&riemannian_grad(a, p, &z, &candidate.w));
    let polished = Run { z, w: candidate.w.clone(), value, residual };
    if polished.value <= run.value + 1e-14 * run.value.abs().max(1.0) && polished.residual <= run.residual.max(opts.tol)
    {
        polished
    } else if candidate.value < run.value {
        candidate
    } else {
        run
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let norm = v.norm();
        if norm > 1e-3 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

fn to_vec(v: &CVec) -> Vec<Complex64> {
    v.iter().copied().collect()
}

/// Certifies `gamma_A`: closed form for `N = 1`, multistart descent otherwise.
pub fn certify_gamma(a: &CMat, p: f64, opts: &CertifyOptions) -> Result<DissipativityCertificate> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Dimension(format!("A must be square, got {:?}", a.shape())));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent p must satisfy 1 < p < inf, got {p}")));
    }
    let n = a.nrows();
    if n == 1 {
        let w = CVec::from_element(1, Complex64::new(1.0, 0.0));
        let z = inner_minimizer(a, p, &w);
        return Ok(DissipativityCertificate {
            p,
            gamma_a: scalar_gamma(a[(0, 0)], p),
            z_star: to_vec(&z),
            w_star: to_vec(&w),
            method: Method::ClosedForm,
            n_starts: 0,
            residual: 0.0,
            certified: true,
        });
    }
    if opts.n_starts == 0 {
        return Err(Error::InvalidParameter("n_starts must be positive".into()));
    }

    let runs: Vec<Run> = (0..opts.n_starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let z = random_unit(&mut rng, n);
            let w = random_unit(&mut rng, n);
            let run = descend(a, p, z, w, opts);
            polish(a, p, run, opts)
        })
        .collect();

    // Fixed index order: ties keep the earliest start.
    let mut best = &runs[0];
    for r in &runs[1..] {
        if r.value < best.value {
            best = r;
        }
    }
    let best = if best.residual > opts.tol {
        polish(a, p, descend(a, p, best.z.clone(), best.w.clone(), opts), opts)
    } else {
        best.clone()
    };
    let certificate = DissipativityCertificate {
        p,
        gamma_a: form_value(a, p, &best.z, &best.w),
        z_star: to_vec(&best.z),
        w_star: to_vec(&best.w),
        method: Method::Multistart,
        n_starts: opts.n_starts,
        residual: best.residual,
        certified: best.residual <= opts.tol,
    };
    if certificate.certified {
        Ok(certificate)
    } else {
        Err(Error::NotConverged { incumbent: Box::new(certificate) })
    }
}

/// Real symmetric matrix of `z -> F(z, w)` on the real embedding of `C^N`,
/// recovered from `form_value` by polarization.
fn z_quadratic_form(a: &CMat, p: f64, w: &CVec) -> RMat {
    let n = a.nrows();
    let basis = |k: usize| {
        let mut e = CVec::zeros(n);
        e[k % n] = if k < n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
        e
    };
    let m = 2 * n;
    RMat::from_fn(m, m, |i, j| {
        let (ei, ej) = (basis(i), basis(j));
        0.25 * (form_value(a, p, &(&ei + &ej), w) - form_value(a, p, &(&ei - &ej), w))
    })
}

/// Unit `w` from `N-1` modulus angles and `N-1` relative phases; the first
/// component is real and non-negative.
fn hyperspherical(angles: &[f64], phases: &[f64], n: usize) -> CVec {
    let mut moduli = vec![0.0; n];
    let mut carry = 1.0;
    for k in 0..n - 1 {
        moduli[k] = carry * angles[k].cos();
        carry *= angles[k].sin();
    }
    moduli[n - 1] = carry;
    CVec::from_fn(n, |k, _| {
        if k == 0 {
            Complex64::new(moduli[0], 0.0)
        } else {
            Complex64::from_polar(moduli[k], phases[k - 1])
        }
    })
}

/// Brute-force minimum of the form: a grid over unit `w` (modulo a global phase)
/// and an exact eigenvalue minimization over unit `z`. Cost grows like
/// `resolution^(2N-2)`, so keep `N <= 3`.
pub fn gamma_oracle(a: &CMat, p: f64, resolution: usize) -> Result<f64> {
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!("oracle resolution must be at least 8, got {resolution}")));
    }
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Dimension(format!("A must be square, got {:?}", a.shape())));
    }
    let n = a.nrows();
    let dims = 2 * (n - 1);
    let total = resolution.checked_pow(dims as u32).ok_or(Error::CostGuard { n: resolution, limit: 0 })?;
    let eval = |idx: usize| {
        let mut rest = idx;
        let mut coords = vec![0usize; dims];
        for c in coords.iter_mut() {
            *c = rest % resolution;
            rest /= resolution;
        }
        let angles: Vec<f64> =
            coords[..n - 1].iter().map(|&i| std::f64::consts::FRAC_PI_2 * i as f64 / (resolution - 1) as f64).collect();
        let phases: Vec<f64> =
            coords[n - 1..].iter().map(|&i| std::f64::consts::TAU * i as f64 / resolution as f64).collect();
        let w = hyperspherical(&angles, &phases, n);
        SymmetricEigen::new(z_quadratic_form(a, p, &w)).eigenvalues.min()
    };
    Ok((0..total).into_par_iter().map(eval).reduce(|| f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{c_diag, c_identity};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(v: &[Complex64]) -> CVec {
        CVec::from_column_slice(v)
    }

    /// Scalar minimum by scanning the relative phase of `z` against `w = 1`.
    fn phase_scan(a: Complex64, p: f64) -> f64 {
        let m = 200_000;
        (0..m)
            .map(|k| {
                let d = std::f64::consts::TAU * k as f64 / m as f64;
                a.re + (p - 2.0) * (a.re * d.cos().powi(2) + a.im * d.sin() * d.cos())
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn form_value_examples() {
        let id = c_identity(2);
        let z = cv(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let w = cv(&[c(0.0, 1.0), c(0.0, 0.0)]);
        assert!((form_value(&id, 2.0, &z, &w) - 1.0).abs() < 1e-15);
        let one = cv(&[c(1.0, 0.0)]);
        assert_eq!(form_value(&c_identity(1), 4.0, &one, &one), 3.0);
        let e1 = cv(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = cv(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(form_value(&id, 1.5, &e1, &e2), 1.0);
    }

    #[test]
    fn scalar_gamma_matches_phase_scan() {
        for (a, p, expected) in
            [(c(1.0, 0.0), 3.0, 1.0), (c(1.0, 1.0), 2.0, 1.0), (c(1.0, 2.0), 4.0, 2.0 - 5f64.sqrt())]
        {
            assert!((scalar_gamma(a, p) - expected).abs() < 1e-12);
            assert!((phase_scan(a, p) - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn inner_minimizer_attains_inner_min() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.3, 0.0), c(-0.2, 0.1), c(2.0, -1.0)]);
        let w = normalized(cv(&[c(0.3, -0.4), c(0.7, 0.2)]));
        for p in [1.3, 2.0, 3.5] {
            let z = inner_minimizer(&a, p, &w);
            assert!((z.norm() - 1.0).abs() < 1e-14);
            assert!((form_value(&a, p, &z, &w) - inner_min_value(&a, p, &w)).abs() < 1e-13);
            let eig = SymmetricEigen::new(z_quadratic_form(&a, p, &w)).eigenvalues.min();
            assert!((eig - inner_min_value(&a, p, &w)).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_examples() {
        assert!((gamma_oracle(&c_identity(2), 1.5, 64).unwrap() - 0.5).abs() < 0.02);
        assert!((gamma_oracle(&c_identity(1), 3.0, 64).unwrap() - 1.0).abs() < 0.02);
        for p in [1.5, 3.0] {
            assert!(gamma_oracle(&c_diag(&[c(0.0, 1.0)]), p, 16).unwrap() < 0.0);
        }
        assert!(gamma_oracle(&c_identity(2), 2.0, 7).is_err());
    }

    #[test]
    fn certify_examples() {
        let cert = certify_gamma(&c_identity(3), 1.5, &CertifyOptions::default()).unwrap();
        assert!((cert.gamma_a - 0.5).abs() < 1e-6, "{cert:?}");
        assert!(cert.passes());

        let a = c_diag(&[c(1.0, 0.0), c(1.0, 3.0)]);
        let cert = certify_gamma(&a, 4.0, &CertifyOptions::default()).unwrap();
        assert!(cert.gamma_a <= scalar_gamma(c(1.0, 3.0), 4.0) + 1e-9);
        assert!(!cert.passes());

        let cert = certify_gamma(&c_identity(2), 2.0, &CertifyOptions::default()).unwrap();
        assert!((cert.gamma_a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_is_consistent_and_below_oracle() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0, 0.3), c(0.5, -0.4), c(0.1, 0.2), c(1.0, 0.8)]);
        for p in [1.4, 2.5, 5.0] {
            let cert = certify_gamma(&a, p, &CertifyOptions::default()).unwrap();
            let z = cv(&cert.z_star);
            let w = cv(&cert.w_star);
            assert!((form_value(&a, p, &z, &w) - cert.gamma_a).abs() < 1e-9);
            assert!((z.norm() - 1.0).abs() < 1e-12 && (w.norm() - 1.0).abs() < 1e-12);
            let oracle = gamma_oracle(&a, p, 96).unwrap();
            assert!(cert.gamma_a <= oracle + 1e-9, "p={p}: {} > {oracle}", cert.gamma_a);
            assert!(oracle - cert.gamma_a < 0.05, "p={p}: {} vs {oracle}", cert.gamma_a);
        }
    }

    #[test]
    fn certify_is_deterministic() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.4, 0.0), c(0.0, -0.3), c(1.5, -0.7)]);
        let x = certify_gamma(&a, 3.0, &CertifyOptions::default()).unwrap();
        let y = certify_gamma(&a, 3.0, &CertifyOptions::default()).unwrap();
        assert_eq!(x.gamma_a.to_bits(), y.gamma_a.to_bits());
        assert_eq!(x.w_star, y.w_star);
    }
}
