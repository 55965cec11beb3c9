//! `T(t) v (x) = [K_t * v](e^{tS} x)` on a periodic grid.
//!
//! Convolution with `K_t` is a Fourier multiplier, diagonal in the joint
//! eigenbasis: component `j` is multiplied by `exp(-t lambda_j |k|^2 - t mu_j)`.
//! The drift enters as a resampling of the input at the rotated nodes.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{interpolate_with, lp_norm, GridField, GridSpec, SchwartzFunction, Stencil, DECAY_TOL};
use crate::spectral::{eigenstructure, rotation, EigenStructure, OuProblem, RMat};

/// Largest points-per-axis accepted by [`apply_t_direct`] without the override.
pub const DIRECT_LIMIT: usize = 64;

pub struct SemigroupPlan {
    problem: OuProblem,
    eig: EigenStructure,
    spec: GridSpec,
    /// `|k|^2` at every node in FFT ordering.
    k2: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    stencil: Stencil,
}

impl std::fmt::Debug for SemigroupPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SemigroupPlan")
            .field("spec", &self.spec)
            .field("stencil", &self.stencil)
            .finish_non_exhaustive()
    }
}

impl SemigroupPlan {
    pub fn new(problem: &OuProblem, spec: GridSpec) -> Result<Self> {
        let eig = eigenstructure(problem.a(), problem.b())?;
        Self::with_eigenstructure(problem, eig, spec)
    }

    pub fn with_eigenstructure(problem: &OuProblem, eig: EigenStructure, spec: GridSpec) -> Result<Self> {
        if problem.dim() != spec.d {
            return Err(Error::Dimension(format!("problem has d = {}, grid has d = {}", problem.dim(), spec.d)));
        }
        if let Some(l) = eig.lam_a.iter().find(|l| l.re <= 0.0) {
            return Err(Error::Assumption {
                condition: "A2",
                detail: format!("eigenvalue {l} of A has non-positive real part"),
            });
        }
        if !problem.is_rotational() {
            return Err(Error::Assumption {
                condition: "A5",
                detail: format!("drift is not skew-symmetric (defect {:.3e})", problem.skew_defect()),
            });
        }
        let n = spec.n;
        let dk = std::f64::consts::PI / spec.half_extent;
        let freq = |m: usize| {
            let m = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            m * dk
        };
        let k2 = (0..spec.len()).map(|flat| spec.multi_index(flat).iter().map(|&m| freq(m).powi(2)).sum()).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            problem: problem.clone(),
            eig,
            spec,
            k2,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            stencil: Stencil::default(),
        })
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn problem(&self) -> &OuProblem {
        &self.problem
    }

    pub fn eig(&self) -> &EigenStructure {
        &self.eig
    }

    /// Symbol of component `j` at flat frequency index `m`.
    pub fn multiplier(&self, j: usize, m: usize, t: f64) -> Complex64 {
        (-(self.eig.lam_a[j] * self.k2[m] + self.eig.lam_b[j]) * t).exp()
    }

    fn fft_axis(&self, data: &mut [Complex64], axis: usize, fft: &Arc<dyn Fft<f64>>) {
        let spec = self.spec;
        let n = spec.n;
        let stride = spec.stride(axis);
        let starts: Vec<usize> = (0..spec.len()).filter(|&f| (f / stride).is_multiple_of(n)).collect();
        let lines: Vec<Vec<Complex64>> = starts
            .par_iter()
            .map(|&s| {
                let mut line: Vec<Complex64> = (0..n).map(|i| data[s + i * stride]).collect();
                fft.process(&mut line);
                line
            })
            .collect();
        for (s, line) in starts.iter().zip(lines) {
            for (i, z) in line.into_iter().enumerate() {
                data[s + i * stride] = z;
            }
        }
    }

    /// Diffusion and potential only, without the rotation.
    pub fn apply_multiplier(&self, v: &GridField, t: f64) -> Result<GridField> {
        self.check_field(v)?;
        let nc = v.components;
        let eigen = v.apply_matrix(&self.eig.y_inv)?;
        let scale = 1.0 / self.spec.len() as f64;
        let comps: Vec<Vec<Complex64>> = (0..nc)
            .into_par_iter()
            .map(|j| {
                let mut data = eigen.component(j);
                for axis in 0..self.spec.d {
                    self.fft_axis(&mut data, axis, &self.forward);
                }
                for (m, z) in data.iter_mut().enumerate() {
                    *z *= self.multiplier(j, m, t) * scale;
                }
                for axis in 0..self.spec.d {
                    self.fft_axis(&mut data, axis, &self.inverse);
                }
                data
            })
            .collect();
        let mut out = GridField::zeros(self.spec, nc);
        for (j, c) in comps.iter().enumerate() {
            out.set_component(j, c);
        }
        out.apply_matrix(&self.eig.y)
    }

    fn check_field(&self, v: &GridField) -> Result<()> {
        if v.spec != self.spec || v.components != self.problem.size() {
            return Err(Error::Dimension("field does not match the plan's grid or system size".into()));
        }
        Ok(())
    }

    /// `T(t) v`.
    pub fn apply(&self, v: &GridField, t: f64) -> Result<GridField> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
        }
        self.check_field(v)?;
        if t == 0.0 {
            return Ok(v.clone());
        }
        v.decay_diagnostic(DECAY_TOL);
        if self.problem.drift_is_zero() {
            return self.apply_multiplier(v, t);
        }
        // The kernel is isotropic in space, so K_t * (v o e^{tS}) = (K_t * v) o e^{tS}.
        // Rotating the (decayed) input first keeps the outside-the-box values
        // genuinely negligible; rotating the diffused field would cut off its tail.
        let r = rotation(self.problem.s(), t);
        let targets = rotated_nodes(&self.spec, &r);
        let inside: Vec<Vec<f64>> = targets.iter().flatten().cloned().collect();
        let mut values = interpolate_with(v, &inside, self.stencil)?.into_iter();
        let mut rotated = GridField::zeros(self.spec, v.components);
        for (flat, target) in targets.iter().enumerate() {
            if target.is_some() {
                let value = values.next().expect("one value per inside point");
                rotated.node_mut(flat).copy_from_slice(&value);
            }
        }
        self.apply_multiplier(&rotated, t)
    }
}

/// `e^{tS} x` for every node. Corner nodes can rotate out of the box (the box
/// is not rotation invariant); those are `None` and take the decayed value 0.
fn rotated_nodes(spec: &GridSpec, r: &RMat) -> Vec<Option<Vec<f64>>> {
    let l = spec.half_extent;
    (0..spec.len())
        .map(|flat| {
            let x = spec.point(flat);
            let y: Vec<f64> = (0..spec.d).map(|i| (0..spec.d).map(|k| r[(i, k)] * x[k]).sum()).collect();
            y.iter().all(|c| c.abs() <= l).then_some(y)
        })
        .collect()
}

/// `T(t) v` via [`SemigroupPlan::apply`].
pub fn apply_t(plan: &SemigroupPlan, v: &GridField, t: f64) -> Result<GridField> {
    plan.apply(v, t)
}

/// `int H(x, xi, t) v(xi) dxi` by direct nodal quadrature, `O(n^{2d})`.
pub fn apply_t_direct(
    problem: &OuProblem,
    eig: &EigenStructure,
    v: &GridField,
    t: f64,
    allow_large: bool,
) -> Result<GridField> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    let spec = v.spec;
    if spec.n > DIRECT_LIMIT && !allow_large {
        return Err(Error::CostGuard { n: spec.n, limit: DIRECT_LIMIT });
    }
    if problem.dim() != spec.d || problem.size() != v.components {
        return Err(Error::Dimension("field does not match the problem's d or N".into()));
    }
    let factors = crate::kernel::scalar_factors(eig, spec.d, t);
    if eig.lam_a.iter().any(|l| l.re <= 0.0) {
        return Err(Error::Assumption { condition: "A2", detail: "spectrum of A not in the right half-plane".into() });
    }
    let nc = v.components;
    let eigen = v.apply_matrix(&eig.y_inv)?;
    let r = rotation(problem.s(), t);
    let h_vol = spec.cell_volume();
    let nodes: Vec<f64> = (0..spec.n).map(|i| spec.coord(i)).collect();
    let comps: Vec<Vec<Complex64>> = (0..nc)
        .map(|j| {
            let data = eigen.component(j);
            let (c, alpha) = factors[j];
            (0..spec.len())
                .into_par_iter()
                .map(|flat| {
                    let x = spec.point(flat);
                    // Per-axis Gaussian weights exp(-alpha ((Rx)_i - xi)^2).
                    let weights: Vec<Vec<Complex64>> = (0..spec.d)
                        .map(|i| {
                            let y: f64 = (0..spec.d).map(|k| r[(i, k)] * x[k]).sum();
                            nodes.iter().map(|&xi| (-alpha * (y - xi) * (y - xi)).exp()).collect()
                        })
                        .collect();
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, z) in data.iter().enumerate() {
                        let idx = spec.multi_index(m);
                        let w: Complex64 = idx.iter().enumerate().map(|(i, &k)| weights[i][k]).product();
                        acc += w * z;
                    }
                    acc * c * h_vol
                })
                .collect()
        })
        .collect();
    let mut out = GridField::zeros(spec, nc);
    for (j, c) in comps.iter().enumerate() {
        out.set_component(j, c);
    }
    out.apply_matrix(&eig.y)
}

/// `|T(t+s) v - T(t) T(s) v|_p / |v|_p`.
pub fn semigroup_law_check(plan: &SemigroupPlan, v: &GridField, t: f64, s: f64, p: f64) -> Result<f64> {
    let joint = plan.apply(v, t + s)?;
    let split = plan.apply(&plan.apply(v, s)?, t)?;
    Ok(lp_norm(&joint.sub(&split)?, p) / lp_norm(v, p))
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorDefect {
    pub h_time: f64,
    pub p: f64,
    /// `|(T(h) phi - phi) / h - L phi|_p`.
    pub norm: f64,
    /// `|L phi|_p`, for scale.
    pub reference: f64,
    #[serde(skip)]
    pub field: GridField,
}

/// Difference quotient of the semigroup against the exact operator on a test function.
pub fn generator_difference(
    plan: &SemigroupPlan,
    phi: &SchwartzFunction,
    h_time: f64,
    p: f64,
) -> Result<GeneratorDefect> {
    if !(h_time > 0.0 && h_time.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {h_time}")));
    }
    let spec = plan.spec;
    let a_min = plan.eig.lam_a.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
    let width = (2.0 * a_min * h_time).sqrt();
    if width < 2.0 * spec.h() {
        return Err(Error::Unresolvable {
            detail: format!("kernel width {width:.4e} at h = {h_time} spans fewer than two cells"),
            max_spacing: width / 2.0,
        });
    }
    let v = phi.sample(&spec)?;
    let exact = phi.apply_l_infty(&plan.problem)?.sample(&spec)?;
    let stepped = plan.apply(&v, h_time)?;
    let quotient = stepped.sub(&v)?.scaled(Complex64::new(1.0 / h_time, 0.0));
    let field = quotient.sub(&exact)?;
    Ok(GeneratorDefect { h_time, p, norm: lp_norm(&field, p), reference: lp_norm(&exact, p), field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{c_diag, c_from_real, c_identity, planar_rotation_generator, CMat};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn heat(s: RMat, b: f64) -> OuProblem {
        OuProblem::new(c_identity(1), c_diag(&[c(b, 0.0)]), s, 2.0).unwrap()
    }

    fn gaussian(var: f64) -> SchwartzFunction {
        SchwartzFunction::gaussian(vec![0.0, 0.0], var.sqrt(), vec![c(1.0, 0.0)]).unwrap()
    }

    fn coupled() -> OuProblem {
        let a = c_from_real(2, 2, &[1.0, 0.4, 0.0, 1.5]) + c_diag(&[c(0.0, 0.3), c(0.0, -0.2)]);
        let b = &a * c(0.5, 0.0) - c_identity(2) * c(0.2, 0.0);
        OuProblem::new(a, b, planar_rotation_generator(2, 1.0), 2.0).unwrap()
    }

    #[test]
    fn heat_flow_of_gaussian() {
        // Wide box: the output has variance 2 and must not see its periodic images.
        let spec = GridSpec::new(2, 12.0, 128).unwrap();
        let plan = SemigroupPlan::new(&heat(RMat::zeros(2, 2), 0.0), spec).unwrap();
        let out = plan.apply(&gaussian(1.0).sample(&spec).unwrap(), 0.5).unwrap();
        // Variance 1 -> 1 + 2t, amplitude 1 / (1 + 2t).
        let exact =
            SchwartzFunction::gaussian(vec![0.0, 0.0], 2f64.sqrt(), vec![c(0.5, 0.0)]).unwrap().sample(&spec).unwrap();
        let err = out.sub(&exact).unwrap().max_norm();
        assert!(err < 1e-12, "{err:e} peak {}", out.max_norm());
        assert!((out.max_norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotation_leaves_radial_data_alone() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let v = gaussian(1.0).sample(&spec).unwrap();
        let still = SemigroupPlan::new(&heat(RMat::zeros(2, 2), 0.0), spec).unwrap().apply(&v, 0.7).unwrap();
        let turning =
            SemigroupPlan::new(&heat(planar_rotation_generator(2, 1.0), 0.0), spec).unwrap().apply(&v, 0.7).unwrap();
        assert!(still.sub(&turning).unwrap().max_norm() < 5e-6);
    }

    #[test]
    fn scalar_potential_factors_out() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let v = gaussian(0.8).sample(&spec).unwrap();
        let free = SemigroupPlan::new(&heat(RMat::zeros(2, 2), 0.0), spec).unwrap().apply(&v, 1.0).unwrap();
        let damped = SemigroupPlan::new(&heat(RMat::zeros(2, 2), 1.0), spec).unwrap().apply(&v, 1.0).unwrap();
        let diff = damped.sub(&free.scaled(c((-1.0f64).exp(), 0.0))).unwrap();
        assert!(diff.max_norm() < 1e-14);
    }

    #[test]
    fn direct_quadrature_agrees_with_multiplier() {
        let p = coupled();
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let phi = SchwartzFunction::gaussian(vec![0.5, -0.3], 1.0, vec![c(1.0, 0.2), c(-0.4, 0.7)])
            .unwrap()
            .with_term(vec![1, 0], vec![c(0.3, 0.0), c(0.0, 0.2)])
            .unwrap();
        let v = phi.sample(&spec).unwrap();
        let plan = SemigroupPlan::new(&p, spec).unwrap();
        let t = 0.6;
        let fast = plan.apply(&v, t).unwrap();
        let slow = apply_t_direct(&p, plan.eig(), &v, t, false).unwrap();
        let rel = lp_norm(&fast.sub(&slow).unwrap(), 2.0) / lp_norm(&slow, 2.0);
        assert!(rel < 1e-4, "{rel:e}");
    }

    #[test]
    fn direct_quadrature_cost_guard() {
        let p = heat(RMat::zeros(2, 2), 0.0);
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let e = eigenstructure(p.a(), p.b()).unwrap();
        let v = GridField::zeros(spec, 1);
        assert!(matches!(apply_t_direct(&p, &e, &v, 0.1, false), Err(Error::CostGuard { .. })));
    }

    #[test]
    fn direct_quadrature_preserves_mass() {
        let p = heat(RMat::zeros(2, 2), 0.0);
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let e = eigenstructure(p.a(), p.b()).unwrap();
        let bump = gaussian(0.5).sample(&spec).unwrap();
        let mass = |f: &GridField| f.values.iter().map(|z| z.re).sum::<f64>() * spec.cell_volume();
        let out = apply_t_direct(&p, &e, &bump, 0.4, false).unwrap();
        assert!((mass(&out) - mass(&bump)).abs() < 1e-10);
    }

    #[test]
    fn semigroup_law() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let phi = SchwartzFunction::gaussian(vec![1.0, 0.5], 1.0, vec![c(1.0, 0.0), c(0.0, 0.5)]).unwrap();
        let v = phi.sample(&spec).unwrap();
        let plan = SemigroupPlan::new(&coupled(), spec).unwrap();
        assert_eq!(semigroup_law_check(&plan, &v, 0.25, 0.0, 2.0).unwrap(), 0.0);
        let defect = semigroup_law_check(&plan, &v, 0.25, 0.25, 2.0).unwrap();
        assert!(defect < 1e-5, "{defect:e}");

        let still = coupled().with_s(RMat::zeros(2, 2)).unwrap();
        let plan = SemigroupPlan::new(&still, spec).unwrap();
        assert!(semigroup_law_check(&plan, &v, 0.25, 0.25, 2.0).unwrap() < 1e-10);
    }

    #[test]
    fn generator_guard_and_linearity() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let plan = SemigroupPlan::new(&coupled(), spec).unwrap();
        let phi = SchwartzFunction::gaussian(vec![0.0, 0.0], 1.5, vec![c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(generator_difference(&plan, &phi, 1e-4, 2.0), Err(Error::Unresolvable { .. })));
        let base = generator_difference(&plan, &phi, 0.05, 2.0).unwrap();
        let k = c(0.3, -1.2);
        let scaled = generator_difference(&plan, &phi.scale(k), 0.05, 2.0).unwrap();
        assert!((scaled.norm - k.norm() * base.norm).abs() < 1e-10 * base.norm);
    }

    #[test]
    fn non_accretive_plan_is_refused() {
        let p = OuProblem::new(c_diag(&[c(-1.0, 0.0)]), CMat::zeros(1, 1), RMat::zeros(2, 2), 2.0).unwrap();
        let spec = GridSpec::new(2, 8.0, 32).unwrap();
        assert!(matches!(SemigroupPlan::new(&p, spec), Err(Error::Assumption { condition: "A2", .. })));
    }
}
