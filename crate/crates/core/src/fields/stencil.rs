//! Fourth-order periodic finite differences and the grid form of the operator.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{GridField, DECAY_TOL};
use crate::error::{Error, Result};
use crate::spectral::OuProblem;

fn apply_stencil(v: &GridField, axis: usize, weights: &[(isize, f64)], scale: f64) -> GridField {
    let spec = v.spec;
    let nc = v.components;
    let n = spec.n as isize;
    let stride = spec.stride(axis);
    let values: Vec<Complex64> = (0..spec.len())
        .into_par_iter()
        .flat_map_iter(|flat| {
            let i = ((flat / stride) % spec.n) as isize;
            let base = flat - (i as usize) * stride;
            (0..nc).map(move |c| {
                weights
                    .iter()
                    .map(|&(off, w)| {
                        let j = (i + off).rem_euclid(n) as usize;
                        v.values[(base + j * stride) * nc + c] * w
                    })
                    .sum::<Complex64>()
                    * scale
            })
        })
        .collect();
    GridField { spec, components: nc, values }
}

/// `D_axis v`.
pub fn derivative(v: &GridField, axis: usize) -> GridField {
    let h = v.spec.h();
    apply_stencil(v, axis, &[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], 1.0 / (12.0 * h))
}

/// `D_axis^2 v`.
pub fn second_derivative(v: &GridField, axis: usize) -> GridField {
    let h = v.spec.h();
    apply_stencil(v, axis, &[(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)], 1.0 / (12.0 * h * h))
}

/// `D_i D_j v`; the pure second derivative when `i == j`.
pub fn mixed_derivative(v: &GridField, i: usize, j: usize) -> GridField {
    if i == j {
        second_derivative(v, i)
    } else {
        derivative(&derivative(v, i), j)
    }
}

pub fn laplacian(v: &GridField) -> GridField {
    let mut out = second_derivative(v, 0);
    for axis in 1..v.spec.d {
        let dd = second_derivative(v, axis);
        out.values.iter_mut().zip(dd.values).for_each(|(a, b)| *a += b);
    }
    out
}

/// `<Sx, grad v>` at every node.
pub fn drift_term(s: &crate::spectral::RMat, v: &GridField) -> GridField {
    let spec = v.spec;
    let d = spec.d;
    let nc = v.components;
    let grads: Vec<GridField> = (0..d).map(|i| derivative(v, i)).collect();
    let mut out = GridField::zeros(spec, nc);
    for flat in 0..spec.len() {
        let x = spec.point(flat);
        for i in 0..d {
            let sx_i: f64 = (0..d).map(|k| s[(i, k)] * x[k]).sum();
            if sx_i == 0.0 {
                continue;
            }
            for c in 0..nc {
                out.values[flat * nc + c] += grads[i].values[flat * nc + c] * sx_i;
            }
        }
    }
    out
}

/// `A Delta v + <Sx, grad v> - B v` by finite differences. The drift coefficient
/// grows linearly towards the edge, so fields that have not decayed are refused.
pub fn apply_l_infty_grid(problem: &OuProblem, v: &GridField) -> Result<GridField> {
    apply_l_infty_grid_with(problem, v, Some(DECAY_TOL))
}

/// As [`apply_l_infty_grid`] with a caller-chosen decay tolerance (`None` skips the check).
pub fn apply_l_infty_grid_with(problem: &OuProblem, v: &GridField, decay_tol: Option<f64>) -> Result<GridField> {
    if problem.dim() != v.spec.d || problem.size() != v.components {
        return Err(Error::Dimension("field does not match the problem's d or N".into()));
    }
    if let Some(tol) = decay_tol {
        v.require_decay(tol)?;
    }
    let diffusion = laplacian(v).apply_matrix(problem.a())?;
    let drift = drift_term(problem.s(), v);
    let potential = v.apply_matrix(problem.b())?;
    diffusion.axpy(Complex64::new(1.0, 0.0), &drift)?.axpy(Complex64::new(-1.0, 0.0), &potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GridSpec, SchwartzFunction};
    use crate::spectral::{c_from_real, planar_rotation_generator, CMat};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_operator_converges_at_fourth_order() {
        let a = c_from_real(2, 2, &[1.0, 0.2, 0.0, 1.5]);
        let b = c_from_real(2, 2, &[0.5, 0.1, 0.0, -0.2]);
        let p = OuProblem::new(a, b, planar_rotation_generator(2, 0.7), 2.0).unwrap();
        let phi = SchwartzFunction::gaussian(vec![0.3, -0.4], 0.9, vec![c(1.0, 0.0), c(0.0, 0.5)])
            .unwrap()
            .with_term(vec![1, 1], vec![c(0.2, 0.0), c(0.1, -0.1)])
            .unwrap();
        let exact = phi.apply_l_infty(&p).unwrap();
        let mut errors = Vec::new();
        for n in [64usize, 128, 256] {
            let spec = GridSpec::new(2, 8.0, n).unwrap();
            let grid = apply_l_infty_grid(&p, &phi.sample(&spec).unwrap()).unwrap();
            let reference = exact.sample(&spec).unwrap();
            errors.push(grid.sub(&reference).unwrap().max_norm());
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 3.7, "{errors:?}");
        }
    }

    #[test]
    fn undecayed_field_is_refused() {
        let p =
            OuProblem::new(CMat::identity(1, 1), CMat::zeros(1, 1), planar_rotation_generator(2, 1.0), 2.0).unwrap();
        let phi = SchwartzFunction::gaussian(vec![5.9, 5.9], 1.0, vec![c(1.0, 0.0)]).unwrap();
        let spec = GridSpec::new(2, 6.0, 64).unwrap();
        assert!(matches!(apply_l_infty_grid(&p, &phi.sample(&spec).unwrap()), Err(Error::BoundaryDecay { .. })));
    }
}
