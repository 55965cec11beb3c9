//! Joint diagonalization of the coefficient pencil `(A, B)`.
//!
//! Eigenvalues of `A` come from a complex Schur form. Eigenvalues closer than
//! [`CLUSTER_GAP`] (relative to `|A|`) are treated as one eigenvalue, the
//! eigenspace is taken as the numerical null space of `A - mu I`, and `B` is
//! diagonalized again inside it. Defectiveness is reported, never regularized.

use nalgebra::Schur;
use num_complex::Complex64;
use serde::Serialize;

use super::problem::{norm2, CMat, CVec};
use crate::error::{Error, Result};

/// Relative tolerance for the reconstruction residuals of the joint eigenbasis.
pub const TOL_DIAG: f64 = 1e-10;

/// Relative gap below which eigenvalues are merged into one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Singular values of `A - mu I` below this (relative to `|A|`) span the eigenspace.
const NULLSPACE_TOL: f64 = 1e-7;

/// Bases with a larger condition number are treated as numerically defective.
const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Serialize)]
pub struct EigenStructure {
    /// Joint eigenvector basis, unit columns.
    #[serde(skip)]
    pub y: CMat,
    #[serde(skip)]
    pub y_inv: CMat,
    pub lam_a: Vec<Complex64>,
    pub lam_b: Vec<Complex64>,
    /// `|Y^{-1}|_2 |Y|_2`.
    pub kappa_y: f64,
    /// Residuals of `Y diag(lam) Y^{-1}` against `A` and `B`, relative to their norms.
    pub residual_a: f64,
    pub residual_b: f64,
    /// Whether some eigenvalue of `A` was degenerate and `B` had to be re-diagonalized.
    pub degenerate: bool,
}

impl EigenStructure {
    pub fn size(&self) -> usize {
        self.lam_a.len()
    }

    /// `Y diag(f(j)) Y^{-1}`.
    pub fn compose(&self, f: impl Fn(usize) -> Complex64) -> CMat {
        let n = self.size();
        let mut scaled = self.y.clone();
        for j in 0..n {
            let c = f(j);
            for i in 0..n {
                scaled[(i, j)] *= c;
            }
        }
        scaled * &self.y_inv
    }

    /// Coordinates of `v` in the eigenbasis, `Y^{-1} v`.
    pub fn to_eigen(&self, v: &CVec) -> CVec {
        &self.y_inv * v
    }

    pub fn from_eigen(&self, u: &CVec) -> CVec {
        &self.y * u
    }
}

/// Eigenvalues of a general complex matrix in Schur-diagonal order.
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[(0, 0)]];
    }
    // A complex Schur form is triangular, so `eigenvalues` always succeeds.
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Groups eigenvalues whose distance is within `CLUSTER_GAP * scale`.
/// Clusters keep the order of first appearance.
fn cluster(values: &[Complex64], scale: f64) -> Vec<Vec<usize>> {
    let tol = CLUSTER_GAP * scale.max(f64::MIN_POSITIVE);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &z) in values.iter().enumerate() {
        match clusters.iter_mut().find(|c| c.iter().any(|&j| (values[j] - z).norm() <= tol)) {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Orthonormal basis (as columns) of the `dim`-dimensional numerical null space
/// of `m`, or the offending singular value if it is not that large.
fn null_space(m: &CMat, dim: usize, scale: f64) -> std::result::Result<CMat, f64> {
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sigma = svd.singular_values;
    let worst = sigma[n - dim];
    if worst > NULLSPACE_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(worst / scale.max(f64::MIN_POSITIVE));
    }
    let mut basis = CMat::zeros(n, dim);
    for k in 0..dim {
        let row = v_t.row(n - dim + k);
        for i in 0..n {
            basis[(i, k)] = row[i].conj();
        }
    }
    Ok(basis)
}

/// Diagonalizes a single matrix: returns an eigenvector basis (columns).
fn diagonalize(m: &CMat) -> std::result::Result<CMat, f64> {
    let n = m.nrows();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let values = eigenvalues(m);
    let mut basis = CMat::zeros(n, n);
    let mut col = 0;
    for c in cluster(&values, scale) {
        let mu = c.iter().map(|&i| values[i]).sum::<Complex64>() / c.len() as f64;
        let shifted = m - CMat::identity(n, n) * mu;
        let v = null_space(&shifted, c.len(), scale)?;
        basis.columns_mut(col, c.len()).copy_from(&v);
        col += c.len();
    }
    Ok(basis)
}

/// Unit columns, phase fixed so the first (near-)largest entry is real positive.
fn normalize_columns(y: &mut CMat) {
    for j in 0..y.ncols() {
        let norm = y.column(j).norm();
        if norm == 0.0 {
            continue;
        }
        let max = y.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot =
            y.column(j).iter().copied().find(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for i in 0..y.nrows() {
            y[(i, j)] = y[(i, j)] * phase / norm;
        }
    }
}

fn relative_residual(y: &CMat, y_inv: &CMat, lam: &[Complex64], m: &CMat) -> f64 {
    let d = CMat::from_diagonal(&CVec::from_column_slice(lam));
    let diff = (y * d * y_inv - m).norm();
    let scale = m.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Computes a joint eigenbasis of `A` and `B`.
pub fn eigenstructure(a: &CMat, b: &CMat) -> Result<EigenStructure> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "A is {:?}, B is {:?}; both must be the same square shape",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.nrows();
    let scale_a = a.norm().max(f64::MIN_POSITIVE);
    let values = eigenvalues(a);
    let clusters = cluster(&values, scale_a);
    let degenerate = clusters.iter().any(|c| c.len() > 1);

    let mut y = CMat::zeros(n, n);
    let mut col = 0;
    for c in &clusters {
        let m = c.len();
        let mu = c.iter().map(|&i| values[i]).sum::<Complex64>() / m as f64;
        let shifted = a - CMat::identity(n, n) * mu;
        let v = null_space(&shifted, m, scale_a).map_err(|residual| Error::NotDiagonalizable { residual })?;
        let block = if m == 1 {
            v
        } else {
            // B restricted to the eigenspace; it must leave the space invariant.
            let restricted = v.adjoint() * b * &v;
            let leak = (b * &v - &v * &restricted).norm() / b.norm().max(1.0);
            if leak > NULLSPACE_TOL {
                return Err(Error::NotDiagonalizable { residual: leak });
            }
            let w = diagonalize(&restricted).map_err(|residual| Error::NotDiagonalizable { residual })?;
            v * w
        };
        y.columns_mut(col, m).copy_from(&block);
        col += m;
    }
    normalize_columns(&mut y);

    let y_inv = y.clone().try_inverse().ok_or(Error::NotDiagonalizable { residual: f64::INFINITY })?;
    let kappa_y = (norm2(&y) * norm2(&y_inv)).max(1.0);
    if kappa_y > MAX_CONDITION {
        return Err(Error::NotDiagonalizable { residual: 1.0 / kappa_y });
    }

    let ta = &y_inv * a * &y;
    let tb = &y_inv * b * &y;
    let lam_a: Vec<Complex64> = (0..n).map(|j| ta[(j, j)]).collect();
    let lam_b: Vec<Complex64> = (0..n).map(|j| tb[(j, j)]).collect();

    let residual_a = relative_residual(&y, &y_inv, &lam_a, a);
    let residual_b = relative_residual(&y, &y_inv, &lam_b, b);
    let identity_defect = (&y * &y_inv - CMat::identity(n, n)).norm();
    let worst = residual_a.max(residual_b).max(identity_defect);
    if worst > TOL_DIAG {
        return Err(Error::NotDiagonalizable { residual: worst });
    }

    Ok(EigenStructure { y, y_inv, lam_a, lam_b, kappa_y, residual_a, residual_b, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::problem::{c_diag, c_from_real, c_identity};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_pair_gives_identity_basis() {
        let a = c_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = c_diag(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let e = eigenstructure(&a, &b).unwrap();
        assert!((&e.y - c_identity(2)).norm() < 1e-14);
        assert_eq!(e.lam_a, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(e.lam_b, vec![c(1.0, 0.0), c(3.0, 0.0)]);
        assert!((e.kappa_y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_a_uses_b_inside_eigenspace() {
        let a = c_identity(2);
        let b = c_from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = eigenstructure(&a, &b).unwrap();
        assert!(e.degenerate);
        let mut lb: Vec<f64> = e.lam_b.iter().map(|z| z.re).collect();
        lb.sort_by(f64::total_cmp);
        assert!((lb[0] - 1.0).abs() < 1e-12 && (lb[1] - 3.0).abs() < 1e-12);
        // Symmetric B: the basis is orthogonal.
        assert!((e.y.adjoint() * &e.y - c_identity(2)).norm() < 1e-12);
        assert!((e.kappa_y - 1.0).abs() < 1e-10);
    }

    #[test]
    fn triangular_pair_has_nontrivial_condition_number() {
        let a = c_from_real(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let e = eigenstructure(&a, &a).unwrap();
        assert!((e.lam_a[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((e.lam_a[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(e.lam_a, e.lam_b);
        // Y = [(1,0), (1,-1)/sqrt2] up to phase; kappa from the explicit basis.
        let s = 1.0 / 2f64.sqrt();
        let y = c_from_real(2, 2, &[1.0, s, 0.0, -s]);
        let expected = norm2(&y) * norm2(&y.clone().try_inverse().unwrap());
        assert!((e.kappa_y - expected).abs() < 1e-10, "{} vs {}", e.kappa_y, expected);
        assert!(e.kappa_y > 1.0);
    }

    #[test]
    fn nilpotent_b_is_rejected() {
        let a = c_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = c_from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigenstructure(&a, &b), Err(Error::NotDiagonalizable { .. })));
    }

    #[test]
    fn jordan_block_in_degenerate_eigenspace_is_rejected() {
        let a = c_identity(2);
        let b = c_from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(eigenstructure(&a, &b).is_err());
        let jordan = c_from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(eigenstructure(&jordan, &CMat::zeros(2, 2)).is_err());
    }
}
