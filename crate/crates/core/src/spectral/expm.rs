use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::problem::{CMat, RMat, TOL_SKEW};

/// `e^{tS}` for a real skew-symmetric `S`.
///
/// Uses the spectral decomposition of the Hermitian matrix `iS`, so the result is
/// orthogonal to rounding. Inputs that are not skew fall back to a general
/// exponential (and will not be orthogonal).
pub fn rotation(s: &RMat, t: f64) -> RMat {
    let d = s.nrows();
    let scale = s.amax().max(1.0);
    if (s + s.transpose()).amax() > TOL_SKEW * scale {
        return (s * t).exp();
    }
    if t == 0.0 || s.iter().all(|&x| x == 0.0) {
        return RMat::identity(d, d);
    }
    let i_s = s.map(|x| Complex64::new(0.0, x));
    let eig = SymmetricEigen::new(i_s);
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, &mu) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -mu * t);
        for i in 0..d {
            scaled[(i, j)] *= phase;
        }
    }
    (scaled * u.adjoint()).map(|z| z.re)
}

/// `e^{tM}` for a general complex matrix.
pub fn matrix_exp(m: &CMat, t: f64) -> CMat {
    (m * Complex64::new(t, 0.0)).exp()
}
