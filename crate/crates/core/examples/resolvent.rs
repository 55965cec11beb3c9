//! Solve `(lambda - L) v = g` through the Laplace integral of the semigroup and
//! evaluate the resolvent estimates on the solution.

use complex_ou::dissipativity::{certify_gamma, CertifyOptions};
use complex_ou::fields::GridSpec;
use complex_ou::harness::{test_function, Config};
use complex_ou::resolvent::{estimate_report, regularity_ratios, resolve_with_plan, LaplaceQuadSpec, DEFAULT_TAIL_TOL};
use complex_ou::semigroup::SemigroupPlan;
use complex_ou::spectral::spectral_constants;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Config::bundled("rotating-pencil").expect("bundled")?.problem()?;
    let spec = GridSpec::new(2, 8.0, 128)?;
    let plan = SemigroupPlan::new(&problem, spec)?;
    let consts = spectral_constants(problem.a(), problem.b())?;
    let cert = certify_gamma(problem.a(), problem.p(), &CertifyOptions::default())?;
    let g = test_function(2, problem.size(), 1.0)?.sample(&spec)?;

    for lambda in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 2.0), Complex64::new(5.0, 0.0)] {
        let quad = LaplaceQuadSpec::for_plan(&plan, lambda, DEFAULT_TAIL_TOL)?;
        let sol = resolve_with_plan(&plan, &g, lambda, &quad)?;
        println!(
            "lambda = {lambda}: t in [{:.3e}, {:.2}], {} nodes, residual {:.2e}",
            quad.t_min,
            quad.t_max,
            quad.rule().len(),
            sol.residual_norm
        );
        for rec in estimate_report(&problem, &sol, &consts, &cert)? {
            let fmt = |v: Option<f64>| v.map(|x| format!("{x:.5e}")).unwrap_or_else(|| "-".into());
            println!("  {:?} {:<44} lhs {} rhs {}", rec.status, rec.name, fmt(rec.lhs), fmt(rec.rhs));
        }
        let r = regularity_ratios(&problem, &sol)?;
        println!("  c3 = {:.4}, c4 = {:.4}", r.c3, r.c4);
    }
    Ok(())
}
