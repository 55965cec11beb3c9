//! Run the full verification pipeline on every bundled configuration.
//!
//! Pass a configuration path to run that file instead.

use complex_ou::harness::{run_suite, Config, BUNDLED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let configs: Vec<Config> = match std::env::args().nth(1) {
        Some(path) => vec![Config::load(path.as_ref())?],
        None => BUNDLED.iter().map(|(name, _)| Config::bundled(name).expect("bundled")).collect::<Result<_, _>>()?,
    };
    for cfg in configs {
        let report = run_suite(&cfg)?;
        print!("{}", report.to_table());
        for f in report.failures() {
            println!("  failed: {} ({})", f.name, f.anchor);
        }
        println!();
    }
    Ok(())
}
