//! The randomized identity suites, once clean and once with a deliberately
//! corrupted off-diagonal sign.
//!
//! ```text
//! cargo run --release --example identity_suite
//! ```

use jacobi::verify::{run_suites, VerifyConfig};

pub fn run_example() -> jacobi::Result<()> {
    let cfg = VerifyConfig { truncations: 60, specs: 6, ..VerifyConfig::default() };
    let clean = run_suites(&cfg);
    for s in &clean.suites {
        println!(
            "{:<24} {:>5} checked {:>4} skipped  max deviation {:.1e}",
            s.name, s.checked, s.skipped, s.max_deviation
        );
    }
    assert!(clean.passed);

    let broken = run_suites(&VerifyConfig { corrupt_offdiag_sign: true, ..cfg });
    let failing: Vec<&str> = broken.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
    println!("\nwith one flipped sign, failing suites: {}", failing.join(", "));
    assert!(!broken.passed);
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
