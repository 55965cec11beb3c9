//! Write a semigroup evolution to CSV and read it back.

use complex_ou::fields::{lp_norm, read_csv, write_csv, GridSpec};
use complex_ou::harness::{test_function, Config};
use complex_ou::semigroup::SemigroupPlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Config::bundled("identity-2d").expect("bundled")?.problem()?;
    let spec = GridSpec::new(2, 8.0, 64)?;
    let v = SemigroupPlan::new(&problem, spec)?.apply(&test_function(2, problem.size(), 1.0)?.sample(&spec)?, 0.5)?;

    let path = std::env::temp_dir().join("complex-ou-semigroup.csv");
    write_csv(&v, std::fs::File::create(&path)?)?;
    let back = read_csv(std::fs::File::open(&path)?)?;
    println!(
        "wrote {} ({} nodes, {} components), round-trip difference {:.1e}",
        path.display(),
        back.spec.len(),
        back.components,
        lp_norm(&back.sub(&v)?, 2.0)
    );
    Ok(())
}
