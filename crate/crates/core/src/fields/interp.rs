//! Tensor-product Lagrange interpolation on the periodic grid.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::GridField;
use crate::error::{Error, Result};

/// Number of nodes per axis in the interpolation stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    /// 4 points, error `O(h^4)`.
    #[default]
    Cubic,
    /// 6 points, error `O(h^6)`.
    Quintic,
}

impl Stencil {
    fn points(self) -> usize {
        match self {
            Stencil::Cubic => 4,
            Stencil::Quintic => 6,
        }
    }
}

/// Lagrange weights for nodes `lo, lo+1, ..., lo+m-1` relative to the cell start, at offset `f`.
fn weights(m: usize, f: f64) -> (isize, Vec<f64>) {
    let lo = -((m / 2) as isize - 1);
    let nodes: Vec<f64> = (0..m).map(|k| (lo + k as isize) as f64).collect();
    let w =
        (0..m).map(|k| (0..m).filter(|&j| j != k).map(|j| (f - nodes[j]) / (nodes[k] - nodes[j])).product()).collect();
    (lo, w)
}

pub fn interpolate(v: &GridField, points: &[Vec<f64>]) -> Result<Vec<Vec<Complex64>>> {
    interpolate_with(v, points, Stencil::Cubic)
}

pub fn interpolate_with(v: &GridField, points: &[Vec<f64>], stencil: Stencil) -> Result<Vec<Vec<Complex64>>> {
    let spec = v.spec;
    let l = spec.half_extent;
    let slack = 1e-12 * l;
    for x in points {
        if x.len() != spec.d {
            return Err(Error::Dimension(format!("point of length {} on a {}-d grid", x.len(), spec.d)));
        }
        if x.iter().any(|c| !(c.abs() <= l + slack)) {
            return Err(Error::OutsideDomain(x.clone()));
        }
    }
    let m = stencil.points();
    let n = spec.n as isize;
    let nc = v.components;
    Ok(points
        .par_iter()
        .map(|x| {
            let axes: Vec<(isize, isize, Vec<f64>)> = x
                .iter()
                .map(|&c| {
                    let s = (c + l) / spec.h();
                    let i0 = s.floor();
                    let (lo, w) = weights(m, s - i0);
                    (i0 as isize, lo, w)
                })
                .collect();
            let mut out = vec![Complex64::new(0.0, 0.0); nc];
            let total = m.pow(spec.d as u32);
            for combo in 0..total {
                let mut rest = combo;
                let mut weight = 1.0;
                let mut flat = 0usize;
                for (i0, lo, w) in &axes {
                    let k = rest % m;
                    rest /= m;
                    weight *= w[k];
                    let j = (i0 + lo + k as isize).rem_euclid(n) as usize;
                    flat = flat * spec.n + j;
                }
                if weight == 0.0 {
                    continue;
                }
                for (o, z) in out.iter_mut().zip(v.node(flat)) {
                    *o += z * weight;
                }
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GridSpec, SchwartzFunction};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn nodes_are_reproduced() {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let f = GridField::from_fn(spec, 2, |x| vec![c(x[0].sin()), Complex64::new(x[1], x[0])]);
        let pts: Vec<Vec<f64>> = [5usize, 100, 777].iter().map(|&i| spec.point(i)).collect();
        let vals = interpolate(&f, &pts).unwrap();
        for (k, &i) in [5usize, 100, 777].iter().enumerate() {
            assert_eq!(vals[k], f.node(i).to_vec());
        }
    }

    #[test]
    fn linear_functions_are_exact_in_the_interior() {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let f = GridField::from_fn(spec, 1, |x| vec![c(2.0 * x[0] - 0.5 * x[1] + 1.0)]);
        let pts = vec![vec![0.123, -1.7], vec![2.9, 3.1], vec![-3.0, 0.01]];
        for (x, v) in pts.iter().zip(interpolate(&f, &pts).unwrap()) {
            assert!((v[0] - c(2.0 * x[0] - 0.5 * x[1] + 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn off_node_gaussian_converges_at_fourth_order() {
        let phi = SchwartzFunction::gaussian(vec![0.0, 0.0], 1.0 / 2f64.sqrt(), vec![c(1.0)]).unwrap();
        let mut errors = Vec::new();
        for n in [64usize, 128, 256] {
            let spec = GridSpec::new(2, 6.0, n).unwrap();
            let x = vec![0.5 * spec.h(), 0.0];
            let v = interpolate(&phi.sample(&spec).unwrap(), std::slice::from_ref(&x)).unwrap();
            errors.push((v[0][0] - phi.eval(&x)[0]).norm());
        }
        for w in errors.windows(2) {
            assert!((w[0] / w[1]).log2() > 3.7, "{errors:?}");
        }
        let spec = GridSpec::new(2, 6.0, 64).unwrap();
        let x = vec![0.37 * spec.h() + 0.2, -0.61];
        let cubic = interpolate(&phi.sample(&spec).unwrap(), std::slice::from_ref(&x)).unwrap();
        let quintic =
            interpolate_with(&phi.sample(&spec).unwrap(), std::slice::from_ref(&x), Stencil::Quintic).unwrap();
        let exact = phi.eval(&x)[0];
        assert!((quintic[0][0] - exact).norm() < (cubic[0][0] - exact).norm());
    }

    #[test]
    fn outside_points_are_rejected() {
        let spec = GridSpec::new(2, 4.0, 16).unwrap();
        let f = GridField::zeros(spec, 1);
        assert!(matches!(interpolate(&f, &[vec![4.5, 0.0]]), Err(Error::OutsideDomain(_))));
        assert!(interpolate(&f, &[vec![4.0, -4.0]]).is_ok());
    }
}
