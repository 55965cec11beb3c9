//! Apply `T(t)` to a Schwartz sample, then check the semigroup law and the
//! generator quotient on a step ladder.

use complex_ou::fields::{lp_norm, GridSpec};
use complex_ou::harness::{fit_slope, test_function, Config};
use complex_ou::semigroup::{generator_difference, semigroup_law_check, SemigroupPlan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Config::bundled("identity-2d").expect("bundled")?.problem()?;
    let spec = GridSpec::new(2, 8.0, 256)?;
    let plan = SemigroupPlan::new(&problem, spec)?;
    let phi = test_function(2, problem.size(), 1.0)?;
    let v = phi.sample(&spec)?;

    for t in [0.1, 0.5, 1.0] {
        let out = plan.apply(&v, t)?;
        println!("|T({t})v|_2 / |v|_2 = {:.6}", lp_norm(&out, 2.0) / lp_norm(&v, 2.0));
    }
    println!("law defect at t = s = 0.25: {:.3e}", semigroup_law_check(&plan, &v, 0.25, 0.25, 2.0)?);

    let steps = [0.2, 0.1, 0.05, 0.025];
    let mut defects = Vec::new();
    for h in steps {
        let g = generator_difference(&plan, &phi, h, 2.0)?;
        println!("h = {h:<5} |(T(h)phi - phi)/h - L phi|_2 = {:.4e}", g.norm);
        defects.push(g.norm);
    }
    println!("fitted order {:.3}", fit_slope(&steps, &defects));
    Ok(())
}
