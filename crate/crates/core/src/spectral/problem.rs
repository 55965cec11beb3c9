use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

/// Relative tolerance for the skew-symmetry check on the drift matrix.
pub const TOL_SKEW: f64 = 1e-10;

/// The coefficient data of `A Δv + <Sx, ∇v> - B v` together with the Lebesgue exponent.
///
/// Construction only checks shapes and ranges. Whether the matrices satisfy the
/// structural conditions is the job of [`check_assumptions`](super::check_assumptions).
#[derive(Debug, Clone, PartialEq)]
pub struct OuProblem {
    a: CMat,
    b: CMat,
    s: RMat,
    p: f64,
}

impl OuProblem {
    pub fn new(a: CMat, b: CMat, s: RMat, p: f64) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::Dimension(format!("A must be square and non-empty, got {}x{}", a.nrows(), a.ncols())));
        }
        if b.shape() != a.shape() {
            return Err(Error::Dimension(format!(
                "B is {}x{} but A is {}x{}",
                b.nrows(),
                b.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if !s.is_square() {
            return Err(Error::Dimension(format!("S must be square, got {}x{}", s.nrows(), s.ncols())));
        }
        if s.nrows() < 2 {
            return Err(Error::InvalidParameter(format!("spatial dimension must be at least 2, got {}", s.nrows())));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent p must satisfy 1 < p < inf, got {p}")));
        }
        let finite = a.iter().chain(b.iter()).all(|z| z.is_finite()) && s.iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { a, b, s, p })
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn s(&self) -> &RMat {
        &self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// System size `N`.
    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), self.s.clone(), p)
    }

    pub fn with_b(&self, b: CMat) -> Result<Self> {
        Self::new(self.a.clone(), b, self.s.clone(), self.p)
    }

    pub fn with_s(&self, s: RMat) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), s, self.p)
    }

    /// `max |S + S^T|` relative to `max(1, max |S|)`.
    pub fn skew_defect(&self) -> f64 {
        let sym = &self.s + self.s.transpose();
        let scale = self.s.amax().max(1.0);
        sym.amax() / scale
    }

    pub fn is_rotational(&self) -> bool {
        self.skew_defect() <= TOL_SKEW
    }

    pub fn drift_is_zero(&self) -> bool {
        self.s.iter().all(|&x| x == 0.0)
    }
}

/// Wire form of a complex matrix: rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexMatrixRepr(pub Vec<Vec<[f64; 2]>>);

impl From<&CMat> for ComplexMatrixRepr {
    fn from(m: &CMat) -> Self {
        ComplexMatrixRepr(
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect(),
        )
    }
}

/// Identity matrix in `C^{n,n}`.
pub fn c_identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Complex diagonal matrix from entries.
pub fn c_diag(entries: &[Complex64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(entries))
}

/// Complex matrix from real row-major entries.
pub fn c_from_real(n: usize, m: usize, rows: &[f64]) -> CMat {
    DMatrix::from_row_slice(n, m, rows).map(|x| Complex64::new(x, 0.0))
}

/// Standard 2x2 rotation generator `[[0, w], [-w, 0]]` embedded in the top-left
/// corner of a `d x d` zero matrix.
pub fn planar_rotation_generator(d: usize, omega: f64) -> RMat {
    let mut s = RMat::zeros(d, d);
    s[(0, 1)] = omega;
    s[(1, 0)] = -omega;
    s
}

/// Operator 2-norm.
pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}
