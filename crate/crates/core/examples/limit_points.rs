//! Limit points of truncation spectra and the decay of `a_N |δ_N|` along
//! each cluster.
//!
//! ```text
//! cargo run --release --example limit_points
//! ```

use jacobi::spectra::limit_points;
use jacobi::{presets, Exponent};

pub fn run_example() -> jacobi::Result<()> {
    let spec = presets::ex_b1(Exponent::from_integer(2))?;
    let report = limit_points(&spec, &[25, 50, 100, 200], (0.0, 50.0), 1e-3, 1e-12)?;
    println!("ex-B1 (alpha = 2), window [0, 50], N in {:?}", report.truncations);
    for c in &report.candidates {
        let track: Vec<String> =
            c.gencond_track.iter().map(|p| format!("N={}: 1e{:.1}", p.n, p.log10_a_n_delta_n)).collect();
        println!("  {:>10.6}  spread {:.1e}  {}", c.location, c.spread, track.join(", "));
        let first = c.gencond_track.first().unwrap().log10_a_n_delta_n;
        let last = c.gencond_track.last().unwrap().log10_a_n_delta_n;
        assert!(last < first);
    }
    assert!(!report.candidates.is_empty());

    // For the free operator the limit set is all of [-2, 2]: at a coarse
    // tolerance the candidates cover the interval with no large gap.
    let free = limit_points(&presets::free()?, &[50, 100, 200], (-2.0, 2.0), 0.1, 1e-13)?;
    let locs: Vec<f64> = free.candidates.iter().map(|c| c.location).collect();
    let gap = locs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    println!("free: {} candidates in [-2, 2], largest gap {gap:.3}", locs.len());
    assert!(gap < 0.2 && locs[0] < -1.9 && locs[locs.len() - 1] > 1.9);
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
