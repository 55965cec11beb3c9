//! Polynomial times Gaussian test functions,
//! `phi(x) = P(x - c) exp(-|x - c|^2 / (2 sigma^2))` with `C^N`-valued `P`.
//!
//! The family is closed under differentiation, multiplication by coordinates and
//! constant matrices, so the operator can be applied exactly.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::grid::{GridField, GridSpec};
use crate::error::{Error, Result};
use crate::spectral::{CMat, OuProblem, RMat};

#[derive(Debug, Clone, PartialEq)]
pub struct SchwartzFunction {
    center: Vec<f64>,
    sigma: f64,
    components: usize,
    /// Multi-index in `y = x - c` to coefficient vector.
    terms: BTreeMap<Vec<usize>, Vec<Complex64>>,
}

impl SchwartzFunction {
    pub fn zero(center: Vec<f64>, sigma: f64, components: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("width must be positive, got {sigma}")));
        }
        if center.is_empty() || components == 0 {
            return Err(Error::Dimension("empty center or zero components".into()));
        }
        Ok(Self { center, sigma, components, terms: BTreeMap::new() })
    }

    /// `v exp(-|x - c|^2 / (2 sigma^2))`.
    pub fn gaussian(center: Vec<f64>, sigma: f64, v: Vec<Complex64>) -> Result<Self> {
        let d = center.len();
        let mut f = Self::zero(center, sigma, v.len())?;
        f.terms.insert(vec![0; d], v);
        Ok(f)
    }

    /// Adds `coeffs * y^alpha` to the polynomial.
    pub fn with_term(mut self, alpha: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        if alpha.len() != self.dim() || coeffs.len() != self.components {
            return Err(Error::Dimension("term does not match dimension or component count".into()));
        }
        self.add_term(alpha, &coeffs, Complex64::new(1.0, 0.0));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, alpha: Vec<usize>, coeffs: &[Complex64], scale: Complex64) {
        let entry = self.terms.entry(alpha).or_insert_with(|| vec![Complex64::new(0.0, 0.0); coeffs.len()]);
        for (e, c) in entry.iter_mut().zip(coeffs) {
            *e += scale * c;
        }
    }

    fn empty_like(&self) -> Self {
        Self { terms: BTreeMap::new(), ..self.clone() }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<Complex64> {
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let g = (-r2 / (2.0 * self.sigma * self.sigma)).exp();
        let mut out = vec![Complex64::new(0.0, 0.0); self.components];
        for (alpha, coeffs) in &self.terms {
            let mono: f64 = alpha.iter().zip(&y).map(|(&k, v)| v.powi(k as i32)).product();
            for (o, c) in out.iter_mut().zip(coeffs) {
                *o += c * (mono * g);
            }
        }
        out
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridField> {
        if spec.d != self.dim() {
            return Err(Error::Dimension(format!("function lives in dimension {}, grid in {}", self.dim(), spec.d)));
        }
        let field = GridField::from_fn(*spec, self.components, |x| self.eval(x));
        field.decay_diagnostic(super::grid::DECAY_TOL);
        Ok(field)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().flatten().for_each(|z| *z *= c);
        out
    }

    /// Sum of two functions with the same center and width.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.center != other.center || self.sigma != other.sigma || self.components != other.components {
            return Err(Error::InvalidParameter(
                "only functions sharing center, width and component count can be added".into(),
            ));
        }
        let mut out = self.clone();
        for (alpha, coeffs) in &other.terms {
            out.add_term(alpha.clone(), coeffs, Complex64::new(1.0, 0.0));
        }
        Ok(out)
    }

    /// Multiplies by `y_k = x_k - c_k`.
    fn times_coordinate(&self, k: usize) -> Self {
        let mut out = self.empty_like();
        for (alpha, coeffs) in &self.terms {
            let mut beta = alpha.clone();
            beta[k] += 1;
            out.add_term(beta, coeffs, Complex64::new(1.0, 0.0));
        }
        out
    }

    /// `D_i phi`.
    pub fn derivative(&self, i: usize) -> Self {
        let inv_var = 1.0 / (self.sigma * self.sigma);
        let mut out = self.empty_like();
        for (alpha, coeffs) in &self.terms {
            if alpha[i] > 0 {
                let mut beta = alpha.clone();
                beta[i] -= 1;
                out.add_term(beta, coeffs, Complex64::new(alpha[i] as f64, 0.0));
            }
            let mut beta = alpha.clone();
            beta[i] += 1;
            out.add_term(beta, coeffs, Complex64::new(-inv_var, 0.0));
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = self.empty_like();
        for i in 0..self.dim() {
            let dd = self.derivative(i).derivative(i);
            for (alpha, coeffs) in &dd.terms {
                out.add_term(alpha.clone(), coeffs, Complex64::new(1.0, 0.0));
            }
        }
        out
    }

    /// `M phi` for a constant `N x N` matrix.
    pub fn apply_matrix(&self, m: &CMat) -> Result<Self> {
        if m.nrows() != self.components || m.ncols() != self.components {
            return Err(Error::Dimension("matrix does not match component count".into()));
        }
        let mut out = self.empty_like();
        for (alpha, coeffs) in &self.terms {
            let v: Vec<Complex64> =
                (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)] * coeffs[c]).sum()).collect();
            out.add_term(alpha.clone(), &v, Complex64::new(1.0, 0.0));
        }
        Ok(out)
    }

    /// `<Sx, grad phi>` with `x = y + c`.
    pub fn drift(&self, s: &RMat) -> Result<Self> {
        let d = self.dim();
        if s.nrows() != d || s.ncols() != d {
            return Err(Error::Dimension("drift matrix does not match dimension".into()));
        }
        let mut out = self.empty_like();
        for i in 0..d {
            let di = self.derivative(i);
            for k in 0..d {
                let sik = s[(i, k)];
                if sik == 0.0 {
                    continue;
                }
                let yk = di.times_coordinate(k);
                for (alpha, coeffs) in &yk.terms {
                    out.add_term(alpha.clone(), coeffs, Complex64::new(sik, 0.0));
                }
                for (alpha, coeffs) in &di.terms {
                    out.add_term(alpha.clone(), coeffs, Complex64::new(sik * self.center[k], 0.0));
                }
            }
        }
        Ok(out)
    }

    /// Exact `A Delta phi + <Sx, grad phi> - B phi`.
    pub fn apply_l_infty(&self, problem: &OuProblem) -> Result<Self> {
        if problem.dim() != self.dim() || problem.size() != self.components {
            return Err(Error::Dimension("function does not match the problem's d or N".into()));
        }
        let diffusion = self.laplacian().apply_matrix(problem.a())?;
        let drift = self.drift(problem.s())?;
        let potential = self.apply_matrix(problem.b())?.scale(Complex64::new(-1.0, 0.0));
        diffusion.add(&drift)?.add(&potential)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{c_identity, planar_rotation_generator};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn derivatives_match_central_differences() {
        let phi = SchwartzFunction::gaussian(vec![0.3, -0.2], 0.8, vec![c(1.0, 0.5), c(0.0, 1.0)])
            .unwrap()
            .with_term(vec![2, 1], vec![c(0.5, 0.0), c(-1.0, 0.3)])
            .unwrap();
        let x = [0.7, 0.1];
        let h = 1e-5;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd: Vec<Complex64> =
                phi.eval(&xp).iter().zip(phi.eval(&xm)).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            assert!(close(&fd, &phi.derivative(i).eval(&x), 1e-8));
        }
    }

    #[test]
    fn radial_gaussian_under_rotation_generator() {
        let phi = SchwartzFunction::gaussian(vec![0.0, 0.0], 1.0 / 2f64.sqrt(), vec![c(1.0, 0.0)]).unwrap();
        let s = planar_rotation_generator(2, 1.7);
        let p = OuProblem::new(c_identity(1), CMat::zeros(1, 1), s.clone(), 2.0).unwrap();
        let l = phi.apply_l_infty(&p).unwrap();
        let drift = phi.drift(&s).unwrap();
        for x in [[0.0, 0.0], [0.4, -1.1], [2.0, 0.5]] {
            let r2: f64 = x[0] * x[0] + x[1] * x[1];
            let expected = (4.0 * r2 - 4.0) * (-r2).exp();
            assert!((l.eval(&x)[0] - c(expected, 0.0)).norm() < 1e-13);
            assert!(drift.eval(&x)[0].norm() < 1e-12);
        }
    }

    #[test]
    fn unit_potential_shifts_by_one() {
        let phi = SchwartzFunction::gaussian(vec![0.0, 0.0], 1.0 / 2f64.sqrt(), vec![c(1.0, 0.0)]).unwrap();
        let p = OuProblem::new(c_identity(1), c_identity(1), RMat::zeros(2, 2), 2.0).unwrap();
        let l = phi.apply_l_infty(&p).unwrap();
        let x = [0.6, -0.3];
        let r2: f64 = 0.45;
        assert!((l.eval(&x)[0].re - (4.0 * r2 - 5.0) * (-r2).exp()).abs() < 1e-13);
    }

    #[test]
    fn drift_about_shifted_center() {
        // Off-center Gaussians are not radial about the origin, so the drift survives.
        let phi = SchwartzFunction::gaussian(vec![1.0, 0.0], 1.0, vec![c(1.0, 0.0)]).unwrap();
        let s = planar_rotation_generator(2, 1.0);
        let x = [0.5, 0.8];
        // grad phi = -(x - c) phi, Sx = (x2, -x1).
        let g = phi.eval(&x)[0].re;
        let expected = -(x[1] * (x[0] - 1.0) + (-x[0]) * x[1]) * g;
        assert!((phi.drift(&s).unwrap().eval(&x)[0].re - expected).abs() < 1e-14);
    }

    #[test]
    fn odd_prefactor_is_odd() {
        let phi =
            SchwartzFunction::zero(vec![0.0, 0.0], 1.0, 1).unwrap().with_term(vec![1, 0], vec![c(1.0, 0.0)]).unwrap();
        let spec = GridSpec::new(2, 6.0, 64).unwrap();
        let f = phi.sample(&spec).unwrap();
        for i in 1..64 {
            for j in 0..64 {
                let a = f.node(spec.flat_index(&[i, j]))[0];
                let b = f.node(spec.flat_index(&[64 - i, j]))[0];
                assert!((a + b).norm() < 1e-14);
            }
        }
    }
}
