//! Moments of the convolution kernel against their closed forms, and the
//! absolute moments against the Gaussian-envelope bound.

use complex_ou::harness::Config;
use complex_ou::kernel::{analytic_moment, moment_abs, moment_bound, moment_matrix, AbsQuad, MomentQuad};
use complex_ou::spectral::{eigenstructure, norm2, spectral_constants};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Config::bundled("rotating-pencil").expect("bundled")?.problem()?;
    let eig = eigenstructure(problem.a(), problem.b())?;
    let consts = spectral_constants(problem.a(), problem.b())?;

    for t in [0.05, 0.5, 2.0] {
        for k in 0..=2 {
            let data = moment_matrix(&problem, &eig, k, t, &MomentQuad::default())?;
            let err = data
                .entries
                .iter()
                .map(|e| norm2(&(&e.value - analytic_moment(&problem, &e.index, t))))
                .fold(0.0, f64::max);
            println!("t = {t:<4} k = {k}  max error {err:.2e}");
        }
        for k in 0..=3 {
            let m = moment_abs(&problem, &eig, k, t, &AbsQuad::default())?;
            let bound = moment_bound(&consts, eig.kappa_y, problem.dim(), k, t);
            println!(
                "t = {t:<4} |K| moment k = {k}: {:.5e} <= {:.5e} ({:.1}% of bound)",
                m.value,
                bound,
                100.0 * m.value / bound
            );
        }
    }
    Ok(())
}
