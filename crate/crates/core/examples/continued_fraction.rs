//! Jacobi continued fraction approximants on a grid of complex points.
//!
//! ```text
//! cargo run --release --example continued_fraction
//! ```

use jacobi::cfrac::{approximant, convergence_scan, relative_deviation, resolvent_11};
use jacobi::spectra::truncate;
use jacobi::{presets, Exponent};
use num_complex::Complex64;

pub fn run_example() -> jacobi::Result<()> {
    let spec = presets::ex_b1(Exponent::from_integer(2))?;
    let lambda = Complex64::new(2.0, 3.0);
    for n in [1, 2, 4, 8, 16, 32] {
        let k = approximant(&spec, n, lambda)?;
        let r = resolvent_11(&truncate(&spec, n)?, lambda);
        println!(
            "K_{n:<2}(2+3i) = {:?}   vs resolvent: {:.1e}",
            k.finite().unwrap(),
            relative_deviation(k, r).unwrap()
        );
    }

    let grid: Vec<Complex64> =
        [(2.0, 3.0), (-5.0, 1.0), (0.0, 0.5), (10.0, 10.0)].into_iter().map(|(x, y)| Complex64::new(x, y)).collect();
    let scan = convergence_scan(&spec, &grid, 200, 1e-8, 1e-12)?;
    for e in &scan {
        println!(
            "lambda = {:+}{:+}i: converged {} tail {:?} rate {:?}",
            e.lambda.re, e.lambda.im, e.converged, e.tail_deviation, e.rate
        );
    }
    assert!(scan[0].converged);

    // The free fraction converges only geometrically, at a rate set by the
    // distance from [-2, 2].
    let z = Complex64::new(0.0, 0.3);
    let slow = convergence_scan(&presets::free()?, &[z], 100, 1e-8, 1e-12)?;
    println!("free at 0.3i: converged {} rate {:?}", slow[0].converged, slow[0].rate);
    let rho = slow[0].rate.unwrap();
    let w = (z - (z * z - 4.0).sqrt()) / 2.0;
    let exact = w.norm_sqr().min(1.0 / w.norm_sqr());
    assert!((rho - exact).abs() < 1e-2, "{rho} vs {exact}");

    // A real point on the spectrum of the free truncations is flagged as a
    // likely pole.
    let free = convergence_scan(&presets::free()?, &[Complex64::new(0.0, 0.0)], 41, 1e-8, 1e-12)?;
    println!("free at 0 with N_max = 41: pole suspect {}", free[0].pole_suspect);
    assert!(free[0].pole_suspect);
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
