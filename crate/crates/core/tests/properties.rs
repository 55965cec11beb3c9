use complex_ou::check::{anchor, CheckRecord, Status};
use complex_ou::dissipativity::{certify_gamma, form_value, scalar_gamma, CertifyOptions};
use complex_ou::fields::{lp_norm, GridSpec, SchwartzFunction, DECAY_TOL};
use complex_ou::harness::Config;
use complex_ou::kernel::{convolution_kernel, heat_kernel};
use complex_ou::semigroup::SemigroupPlan;
use complex_ou::spectral::{
    c_diag, c_identity, eigenstructure, eigenvalues, planar_rotation_generator, rotation, spectral_constants, CMat,
    CVec, OuProblem, RMat, TOL_DIAG,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

fn cmat(n: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(complex(), n * n).prop_map(move |v| CMat::from_vec(n, n, v))
}

fn cvec(n: usize) -> impl Strategy<Value = CVec> {
    proptest::collection::vec(complex(), n).prop_map(CVec::from_vec)
}

/// Random `A` with `min Re sigma(A) > 0`: a shifted random matrix.
fn accretive(n: usize) -> impl Strategy<Value = CMat> {
    (cmat(n), 0.0..3.0f64).prop_map(move |(m, s)| {
        let lam_min = eigenvalues(&m).iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        m + c_identity(n) * c(s + 0.1 - lam_min, 0.0)
    })
}

fn skew(d: usize) -> impl Strategy<Value = RMat> {
    proptest::collection::vec(-2.0..2.0f64, d * d).prop_map(move |v| {
        let m = RMat::from_vec(d, d, v);
        &m - m.transpose()
    })
}

fn unitary(n: usize) -> impl Strategy<Value = CMat> {
    cmat(n).prop_map(move |m| (m + c_identity(n) * c(0.5, 0.0)).qr().q())
}

const P_SET: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 6.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_constant_orderings(a in accretive(3), b in cmat(3)) {
        let k = spectral_constants(&a, &b).unwrap();
        let lam = eigenvalues(&a);
        for z in &lam {
            prop_assert!(k.a_min <= z.norm() * (1.0 + 1e-12));
            prop_assert!(k.a_0 <= z.re + 1e-12);
        }
        prop_assert!(k.beta_a <= k.a_0 + 1e-12);
        prop_assert!(k.beta_b >= -k.b_0 - 1e-12);
    }

    #[test]
    fn rotation_is_orthogonal_and_reversible(s in skew(3), t in -3.0..3.0f64) {
        let r = rotation(&s, t);
        let id = RMat::identity(3, 3);
        prop_assert!((&r * r.transpose() - &id).norm() < 1e-12);
        prop_assert!((rotation(&s, -t) - r.transpose()).norm() < 1e-12);
    }

    #[test]
    fn scalar_certificate_matches_closed_form(re in 0.01..5.0f64, im in -5.0..5.0f64, pi in 0..5usize) {
        let a = c(re, im);
        let p = P_SET[pi];
        let cert = certify_gamma(&c_diag(&[a]), p, &CertifyOptions::default()).unwrap();
        let expected = 0.5 * p * re - 0.5 * (p - 2.0).abs() * a.norm();
        prop_assert!((cert.gamma_a - expected).abs() <= 1e-9);
        prop_assert!((scalar_gamma(a, p) - expected).abs() <= 1e-12);
    }

    #[test]
    fn form_is_quadratic_in_z(a in cmat(3), z in cvec(3), w in cvec(3), p in 1.1..8.0f64) {
        let two = z.map(|v| v * 2.0);
        let lhs = form_value(&a, p, &two, &w);
        let rhs = 4.0 * form_value(&a, p, &z, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn convolution_kernel_is_the_heat_kernel_along_the_flow(
        x in proptest::collection::vec(-2.0..2.0f64, 2),
        psi in proptest::collection::vec(-2.0..2.0f64, 2),
        t in 0.01..3.0f64,
        omega in -2.0..2.0f64,
    ) {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.2, 0.4)]);
        let problem = OuProblem::new(a.clone(), &a * c(0.5, 0.0), planar_rotation_generator(2, omega), 2.0).unwrap();
        let eig = eigenstructure(problem.a(), problem.b()).unwrap();
        let r = rotation(problem.s(), t);
        let xi: Vec<f64> = (0..2).map(|i| r[(i, 0)] * x[0] + r[(i, 1)] * x[1] - psi[i]).collect();
        let h = heat_kernel(&problem, &eig, &x, &xi, t).unwrap();
        let k = convolution_kernel(&problem, &eig, &psi, t).unwrap();
        prop_assert!((h - &k).norm() <= 1e-12 * k.norm().max(1e-300));
    }

    #[test]
    fn operator_is_linear_on_schwartz_functions(
        alpha in complex(),
        u in cvec(2),
        v in cvec(2),
        lin in cvec(2),
        x in proptest::collection::vec(-3.0..3.0f64, 2),
    ) {
        let problem = Config::bundled("rotating-pencil").unwrap().unwrap().problem().unwrap();
        let phi = SchwartzFunction::gaussian(vec![0.2, -0.1], 0.9, u.as_slice().to_vec()).unwrap()
            .with_term(vec![1, 1], lin.as_slice().to_vec()).unwrap();
        let psi = SchwartzFunction::gaussian(vec![0.2, -0.1], 0.9, v.as_slice().to_vec()).unwrap();
        let combined = phi.scale(alpha).add(&psi).unwrap().apply_l_infty(&problem).unwrap().eval(&x);
        let lphi = phi.apply_l_infty(&problem).unwrap().eval(&x);
        let lpsi = psi.apply_l_infty(&problem).unwrap().eval(&x);
        for j in 0..2 {
            let expected = alpha * lphi[j] + lpsi[j];
            prop_assert!((combined[j] - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn rotational_drift_annihilates_radial_functions(
        s in skew(2),
        sigma in 0.3..2.0f64,
        x in proptest::collection::vec(-4.0..4.0f64, 2),
    ) {
        let phi = SchwartzFunction::gaussian(vec![0.0, 0.0], sigma, vec![c(1.0, -0.5)]).unwrap();
        let drift = phi.drift(&s).unwrap().eval(&x);
        prop_assert!(drift[0].norm() <= 1e-12);
    }

    #[test]
    fn check_status_follows_the_margin(lhs in -10.0..10.0f64, rhs in 0.1..10.0f64, tol in 0.0..0.5f64) {
        let upper = CheckRecord::upper("x", anchor::PLUMBING, lhs, rhs, tol);
        prop_assert_eq!(upper.status == Status::Pass, (rhs - lhs) / rhs >= -tol);
        let lower = CheckRecord::lower("x", anchor::PLUMBING, lhs, rhs, tol);
        prop_assert_eq!(lower.status == Status::Pass, (lhs - rhs) / rhs >= -tol);
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), p in 1.05..8.0f64) {
        let mut cfg = Config::bundled("identity-2d").unwrap().unwrap();
        cfg.seed = seed;
        cfg.exponent = p;
        let again = Config::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(again.seed, seed);
        prop_assert_eq!(again.exponent, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigenstructure_reconstructs_diagonalizable_pairs(
        y in cmat(3),
        lam_a in proptest::collection::vec((0.5..3.0f64, -2.0..2.0f64), 3),
        lam_b in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 3),
    ) {
        // Near-identity bases keep the condition number moderate.
        let y = c_identity(3) + y * c(0.3, 0.0);
        let y_inv = y.clone().try_inverse().unwrap();
        let da = c_diag(&lam_a.iter().enumerate().map(|(i, &(re, im))| c(re + i as f64, im)).collect::<Vec<_>>());
        let db = c_diag(&lam_b.iter().map(|&(re, im)| c(re, im)).collect::<Vec<_>>());
        let a = &y * da * &y_inv;
        let b = &y * db * &y_inv;
        let eig = eigenstructure(&a, &b).unwrap();
        let rebuilt = &eig.y * c_diag(&eig.lam_a) * &eig.y_inv;
        prop_assert!((rebuilt - &a).norm() <= TOL_DIAG * a.norm());
        prop_assert!(eig.residual_a <= TOL_DIAG && eig.residual_b <= TOL_DIAG);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gamma_is_invariant_under_unitary_congruence(a in accretive(2), u in unitary(2), pi in 0..5usize) {
        let p = P_SET[pi];
        let opts = CertifyOptions::default();
        let g = certify_gamma(&a, p, &opts).unwrap().gamma_a;
        let rotated = u.adjoint() * &a * &u;
        let h = certify_gamma(&rotated, p, &opts).unwrap().gamma_a;
        prop_assert!((g - h).abs() <= 1e-8, "{} vs {}", g, h);
    }

    #[test]
    fn semigroup_stays_in_envelope_and_keeps_decay(t in 0.01..0.25f64, cfg_index in 0..3usize, p in 1.2..4.0f64) {
        let name = ["identity-2d", "a4-violator", "rotating-pencil"][cfg_index];
        let problem = Config::bundled(name).unwrap().unwrap().problem().unwrap();
        // The complex diffusion of a4-violator spreads the Gaussian to |x| ~ 8 by t = 0.25.
        let spec = GridSpec::new(2, 16.0, 128).unwrap();
        let plan = SemigroupPlan::new(&problem, spec).unwrap();
        let v = SchwartzFunction::gaussian(vec![0.3, -0.2], 0.7, vec![c(1.0, 0.0), c(0.0, 0.5)]).unwrap()
            .with_term(vec![1, 0], vec![c(0.2, 0.0), c(0.0, -0.1)]).unwrap()
            .sample(&spec).unwrap();
        let out = plan.apply(&v, t).unwrap();
        let k = spectral_constants(problem.a(), problem.b()).unwrap();
        let envelope = plan.eig().kappa_y * k.a_1.powf(spec.d as f64 / 2.0) * (-k.b_0 * t).exp();
        prop_assert!(lp_norm(&out, p) <= envelope * lp_norm(&v, p) * (1.0 + 1e-3));
        prop_assert!(out.decay_diagnostic(DECAY_TOL));
    }
}

#[test]
fn gamma_of_identity_is_min_one_p_minus_one() {
    for n in 1..=3 {
        for p in P_SET {
            let cert = certify_gamma(&c_identity(n), p, &CertifyOptions::default()).unwrap();
            assert!((cert.gamma_a - 1f64.min(p - 1.0)).abs() <= 1e-6, "N = {n}, p = {p}: {}", cert.gamma_a);
        }
    }
}
