use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative size allowed on the outermost grid layer.
pub const DECAY_TOL: f64 = 1e-8;

/// Uniform periodic grid on `[-L, L)^d` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub half_extent: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(d: usize, half_extent: f64, n: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidParameter(format!("grid dimension must be 2 or 3, got {d}")));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(Error::InvalidParameter(format!("half-extent must be positive, got {half_extent}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("points per axis must be a power of two >= 16, got {n}")));
        }
        Ok(Self { d, half_extent, n })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_extent + self.h() * i as f64
    }

    /// Multi-index of a flat node index; the first axis varies slowest.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for k in (0..self.d).rev() {
            idx[k] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().map(|i| self.coord(i)).collect()
    }

    /// Stride of `axis` in the flat node ordering.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - 1 - axis) as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Whether `flat` lies on the outermost layer of the box.
    pub fn on_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat).iter().any(|&i| i == 0 || i == self.n - 1)
    }
}

/// Samples of a `C^N`-valued function, node-major with the component innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub components: usize,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(spec: GridSpec, components: usize) -> Self {
        Self { spec, components, values: vec![Complex64::new(0.0, 0.0); spec.len() * components] }
    }

    pub fn from_values(spec: GridSpec, components: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() * components {
            return Err(Error::Dimension(format!(
                "{} values for {} nodes x {} components",
                values.len(),
                spec.len(),
                components
            )));
        }
        if values.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("grid field has non-finite entries".into()));
        }
        Ok(Self { spec, components, values })
    }

    /// Evaluates `f` at every node.
    pub fn from_fn(spec: GridSpec, components: usize, f: impl Fn(&[f64]) -> Vec<Complex64> + Sync) -> Self {
        use rayon::prelude::*;
        let values: Vec<Complex64> = (0..spec.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let v = f(&spec.point(i));
                debug_assert_eq!(v.len(), components);
                v
            })
            .collect();
        Self { spec, components, values }
    }

    pub fn node(&self, flat: usize) -> &[Complex64] {
        &self.values[flat * self.components..(flat + 1) * self.components]
    }

    pub fn node_mut(&mut self, flat: usize) -> &mut [Complex64] {
        let n = self.components;
        &mut self.values[flat * n..(flat + 1) * n]
    }

    /// Euclidean norm of the value at a node.
    pub fn node_norm(&self, flat: usize) -> f64 {
        self.node(flat).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.spec.len()).map(|i| self.node_norm(i)).fold(0.0, f64::max)
    }

    /// `max |v|` on the outermost layer divided by `max |v|` overall.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.max_norm();
        if max == 0.0 {
            return 0.0;
        }
        let edge =
            (0..self.spec.len()).filter(|&i| self.spec.on_boundary(i)).map(|i| self.node_norm(i)).fold(0.0, f64::max);
        edge / max
    }

    /// Logs a warning and returns false when the field has not decayed at the edge.
    pub fn decay_diagnostic(&self, tol: f64) -> bool {
        let ratio = self.boundary_ratio();
        if ratio > tol {
            log::warn!("boundary decay violated: edge/max ratio {ratio:.3e} exceeds {tol:.1e}");
            false
        } else {
            true
        }
    }

    pub fn require_decay(&self, tol: f64) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > tol {
            Err(Error::BoundaryDecay { ratio, tol })
        } else {
            Ok(())
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= c);
        out
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec || self.components != other.components {
            return Err(Error::Dimension("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn axpy(&self, c: Complex64, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.values.iter_mut().zip(&other.values).for_each(|(z, w)| *z += c * w);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Applies a constant matrix at every node.
    pub fn apply_matrix(&self, m: &crate::spectral::CMat) -> Result<Self> {
        if m.ncols() != self.components {
            return Err(Error::Dimension(format!(
                "{}x{} matrix applied to {}-component field",
                m.nrows(),
                m.ncols(),
                self.components
            )));
        }
        let rows = m.nrows();
        let mut out = GridField::zeros(self.spec, rows);
        for i in 0..self.spec.len() {
            let v = self.node(i);
            let o = out.node_mut(i);
            for r in 0..rows {
                o[r] = (0..self.components).map(|c| m[(r, c)] * v[c]).sum();
            }
        }
        Ok(out)
    }

    /// One component as its own scalar field.
    pub fn component(&self, c: usize) -> Vec<Complex64> {
        self.values.iter().skip(c).step_by(self.components).copied().collect()
    }

    pub fn set_component(&mut self, c: usize, data: &[Complex64]) {
        let n = self.components;
        for (i, z) in data.iter().enumerate() {
            self.values[i * n + c] = *z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(2, 6.0, 64).is_ok());
        assert!(GridSpec::new(2, 6.0, 48).is_err());
        assert!(GridSpec::new(2, 6.0, 8).is_err());
        assert!(GridSpec::new(4, 6.0, 64).is_err());
        let g = GridSpec::new(3, 4.0, 16).unwrap();
        assert_eq!(g.h() * g.n as f64, 8.0);
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new(3, 1.0, 16).unwrap();
        for flat in [0, 1, 17, 300, g.len() - 1] {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
        assert_eq!(g.stride(0), 256);
        assert_eq!(g.point(g.flat_index(&[0, 8, 15])), vec![-1.0, 0.0, 1.0 - g.h()]);
    }
}
