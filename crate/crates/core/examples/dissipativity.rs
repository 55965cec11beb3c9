//! `|(lambda - L) phi|_p >= lambda |phi|_p` on a Schwartz function, across `p`.

use complex_ou::check::Status;
use complex_ou::dissipativity::{certify_gamma, CertifyOptions};
use complex_ou::fields::GridSpec;
use complex_ou::harness::{test_function, Config};
use complex_ou::resolvent::dissipativity_probe;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Config::bundled("a4-violator").expect("bundled")?.problem()?;
    let spec = GridSpec::new(2, 8.0, 128)?;
    let phi = test_function(2, base.size(), 0.8)?;

    // A = diag(1, 1+3i) is dissipative in L^p only for p close to 2.
    for p in [1.2, 1.5, 2.0, 3.0, 4.0] {
        let problem = base.with_p(p)?;
        let cert = certify_gamma(problem.a(), p, &CertifyOptions::default())?;
        println!("p = {p}: gamma_A = {:+.5}", cert.gamma_a);
        for rec in dissipativity_probe(&problem, &cert, &phi, &spec, &[0.1, 1.0, 10.0])? {
            match rec.status {
                Status::NotApplicable => println!("  {}: not applicable ({})", rec.name, rec.note.unwrap_or_default()),
                s => println!("  {}: {s:?}, margin {:.3e}", rec.name, rec.margin.unwrap_or(f64::NAN)),
            }
        }
    }
    Ok(())
}
