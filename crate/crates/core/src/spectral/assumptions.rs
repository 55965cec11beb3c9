use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;

use super::constants::hermitian_part_min;
use super::eigen::{eigenstructure, eigenvalues, CLUSTER_GAP};
use super::problem::{CMat, OuProblem, TOL_SKEW};
use crate::dissipativity::{certify_gamma, CertifyOptions};
use crate::error::Error;

/// Evidence attached to a verdict. Entry indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    None,
    Residual { residual: f64 },
    Eigenvalue { value: Complex64, vector: Vec<Complex64> },
    Entry { row: usize, col: usize, value: f64 },
    Pair { gamma: f64, z: Vec<Complex64>, w: Vec<Complex64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub condition: String,
    pub holds: bool,
    /// The scalar the verdict is based on (residual, min Re sigma, beta_A, gamma_A, skew defect).
    pub value: f64,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub a1: Verdict,
    pub a2: Verdict,
    pub a3: Verdict,
    pub a4: Verdict,
    pub a5: Verdict,
    /// `A4 => A3 => A2` held on the computed verdicts.
    pub chain_consistent: bool,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts().iter().all(|v| v.holds)
    }

    pub fn verdicts(&self) -> [&Verdict; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a5]
    }
}

fn unit_null_vector(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    // nalgebra sorts singular values in decreasing order.
    (0..n).map(|i| v_t[(n - 1, i)].conj()).collect()
}

fn check_a1(a: &CMat, b: &CMat) -> Verdict {
    match eigenstructure(a, b) {
        Ok(e) => {
            let residual = e.residual_a.max(e.residual_b);
            Verdict {
                condition: "A1".into(),
                holds: true,
                value: residual,
                witness: Witness::Residual { residual },
                note: e.degenerate.then(|| format!("eigenvalues of A merged at relative gap {CLUSTER_GAP:.0e}")),
            }
        }
        Err(err) => {
            let residual = match err {
                Error::NotDiagonalizable { residual } => residual,
                _ => f64::NAN,
            };
            Verdict {
                condition: "A1".into(),
                holds: false,
                value: residual,
                witness: Witness::Residual { residual },
                note: Some(err.to_string()),
            }
        }
    }
}

fn check_a2(a: &CMat) -> Verdict {
    let lam = eigenvalues(a);
    let worst = lam.iter().copied().min_by(|x, y| x.re.total_cmp(&y.re)).expect("non-empty matrix");
    let holds = worst.re > 0.0;
    let n = a.nrows();
    let witness = if holds {
        Witness::None
    } else {
        Witness::Eigenvalue { value: worst, vector: unit_null_vector(&(a - CMat::identity(n, n) * worst)) }
    };
    Verdict { condition: "A2".into(), holds, value: worst.re, witness, note: None }
}

fn check_a3(a: &CMat) -> Verdict {
    let beta = hermitian_part_min(a);
    let holds = beta > 0.0;
    let witness = if holds {
        Witness::None
    } else {
        let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let k = eig.eigenvalues.imin();
        Witness::Eigenvalue {
            value: Complex64::new(beta, 0.0),
            vector: eig.eigenvectors.column(k).iter().copied().collect(),
        }
    };
    Verdict { condition: "A3".into(), holds, value: beta, witness, note: None }
}

fn check_a4(a: &CMat, p: f64) -> Verdict {
    let (cert, note) = match certify_gamma(a, p, &CertifyOptions::default()) {
        Ok(c) => (c, None),
        Err(Error::NotConverged { incumbent }) => {
            (*incumbent, Some("minimization did not converge; incumbent reported".to_string()))
        }
        Err(err) => {
            return Verdict {
                condition: "A4".into(),
                holds: false,
                value: f64::NAN,
                witness: Witness::None,
                note: Some(err.to_string()),
            }
        }
    };
    let holds = cert.gamma_a > 0.0;
    let witness = if holds {
        Witness::None
    } else {
        Witness::Pair { gamma: cert.gamma_a, z: cert.z_star.clone(), w: cert.w_star.clone() }
    };
    Verdict { condition: "A4".into(), holds, value: cert.gamma_a, witness, note }
}

fn check_a5(problem: &OuProblem) -> Verdict {
    let s = problem.s();
    let d = s.nrows();
    let mut worst = (0usize, 0usize, 0.0f64);
    for i in 0..d {
        for j in 0..=i {
            let v = s[(i, j)] + s[(j, i)];
            if v.abs() > worst.2.abs() {
                worst = (i, j, v);
            }
        }
    }
    let defect = problem.skew_defect();
    let holds = defect <= TOL_SKEW;
    let witness =
        if holds { Witness::None } else { Witness::Entry { row: worst.0 + 1, col: worst.1 + 1, value: worst.2 } };
    Verdict { condition: "A5".into(), holds, value: defect, witness, note: None }
}

/// Evaluates every structural condition on the coefficients.
pub fn check_assumptions(problem: &OuProblem) -> AssumptionReport {
    let a1 = check_a1(problem.a(), problem.b());
    let a2 = check_a2(problem.a());
    let a3 = check_a3(problem.a());
    let a4 = check_a4(problem.a(), problem.p());
    let a5 = check_a5(problem);
    let chain_consistent = (!a4.holds || a3.holds) && (!a3.holds || a2.holds);
    AssumptionReport { a1, a2, a3, a4, a5, chain_consistent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::problem::{c_diag, c_from_real, c_identity, planar_rotation_generator};
    use crate::spectral::RMat;

    #[test]
    fn identity_problem_passes() {
        let p = OuProblem::new(c_identity(2), CMat::zeros(2, 2), planar_rotation_generator(2, 1.0), 2.0).unwrap();
        let r = check_assumptions(&p);
        assert!(r.all_hold(), "{r:#?}");
        assert!(r.chain_consistent);
    }

    #[test]
    fn jordan_b_fails_a1_without_panicking() {
        let a = c_diag(&[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let b = c_from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let p = OuProblem::new(a, b, planar_rotation_generator(2, 1.0), 2.0).unwrap();
        let r = check_assumptions(&p);
        assert!(!r.a1.holds);
        assert!(matches!(r.a1.witness, Witness::Residual { residual } if residual > 0.0));
        assert!(r.a2.holds && r.a3.holds && r.a5.holds);
    }

    #[test]
    fn non_skew_drift_has_entry_witness() {
        let s = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let p = OuProblem::new(c_identity(2), CMat::zeros(2, 2), s, 2.0).unwrap();
        let r = check_assumptions(&p);
        assert!(!r.a5.holds);
        assert_eq!(r.a5.witness, Witness::Entry { row: 2, col: 1, value: 1.0 });
    }

    #[test]
    fn rotating_a_fails_a2_with_eigenpair() {
        let a = c_diag(&[Complex64::new(-0.5, 1.0), Complex64::new(1.0, 0.0)]);
        let p = OuProblem::new(a.clone(), CMat::zeros(2, 2), planar_rotation_generator(2, 1.0), 2.0).unwrap();
        let r = check_assumptions(&p);
        assert!(!r.a2.holds && !r.a3.holds && !r.a4.holds);
        assert!(r.chain_consistent);
        match &r.a2.witness {
            Witness::Eigenvalue { value, vector } => {
                assert!((value - Complex64::new(-0.5, 1.0)).norm() < 1e-12);
                let v = nalgebra::DVector::from_column_slice(vector);
                assert!((&a * &v - v.clone() * *value).norm() < 1e-10);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn accretive_but_not_dissipative_for_large_p() {
        let a = c_diag(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 3.0)]);
        let p = OuProblem::new(a, CMat::zeros(2, 2), planar_rotation_generator(2, 1.0), 4.0).unwrap();
        let r = check_assumptions(&p);
        assert!(r.a2.holds && r.a3.holds && !r.a4.holds);
        assert!(matches!(r.a4.witness, Witness::Pair { gamma, .. } if gamma < 0.0));
    }
}
