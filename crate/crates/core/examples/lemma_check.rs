//! The weighted integration-by-parts inequality for `-Re ∫ η v̄ᵀ|v|^{p-2} AΔv`,
//! evaluated by tensor Gauss-Legendre quadrature on a nonvanishing field.

use complex_ou::fields::SchwartzFunction;
use complex_ou::resolvent::{ibp_inequality_check, BoxDomain, Bump, ShiftedField};
use complex_ou::spectral::CMat;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = Complex64::new;
    let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.2, 0.4)]);
    let field = ShiftedField {
        shift: vec![c(2.0, 0.0), c(0.0, 0.0)],
        phi: SchwartzFunction::gaussian(vec![0.0, 0.0], 0.7, vec![c(1.0, 0.0), c(0.0, 0.5)])?
            .with_term(vec![1, 0], vec![c(0.2, 0.1), c(0.2, 0.1)])?,
    };
    let eta = Bump { center: vec![0.3, -0.2], width: 1.2 };
    for p in [1.5, 2.0, 3.0, 6.0] {
        let r = ibp_inequality_check(&a, &field, &eta, &BoxDomain::default(), p, 0.25)?;
        println!(
            "p = {p}: lhs {:+.10e}  rhs {:+.10e}  (lhs - rhs)/scale {:+.2e}",
            r.lhs,
            r.rhs,
            (r.lhs - r.rhs) / r.scale
        );
    }
    Ok(())
}
