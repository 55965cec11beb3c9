//! Structural assumptions, spectral constants and the dissipativity constant
//! for a small non-normal pencil.

use complex_ou::dissipativity::{certify_gamma, gamma_oracle, CertifyOptions};
use complex_ou::spectral::{check_assumptions, planar_rotation_generator, spectral_constants, CMat, OuProblem};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = Complex64::new;
    let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.2, 0.4)]);
    let b = &a * c(0.5, 0.0);
    let problem = OuProblem::new(a, b, planar_rotation_generator(2, 0.5), 1.5)?;

    let report = check_assumptions(&problem);
    for v in report.verdicts() {
        println!("{}: {} (value {:.6})", v.condition, if v.holds { "holds" } else { "fails" }, v.value);
    }

    let k = spectral_constants(problem.a(), problem.b())?;
    println!("a_min {:.4}  a_max {:.4}  a_0 {:.4}  a_1 {:.4}  a_2 {:.4}", k.a_min, k.a_max, k.a_0, k.a_1, k.a_2);
    println!("b_0 {:.4}  beta_A {:.4}  beta_B {:.4}", k.b_0, k.beta_a, k.beta_b);

    for p in [1.2, 1.5, 2.0, 3.0, 6.0] {
        let cert = certify_gamma(problem.a(), p, &CertifyOptions::default())?;
        let brute = gamma_oracle(problem.a(), p, 64)?;
        println!("p = {p:<4} gamma_A = {:+.8}  oracle {:+.5}  certified {}", cert.gamma_a, brute, cert.certified);
    }
    Ok(())
}
