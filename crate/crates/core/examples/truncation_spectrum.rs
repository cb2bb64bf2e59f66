//! Eigenvalues of finite truncations, their last eigenvector coordinate
//! and the bounds and expansions built from it.
//!
//! ```text
//! cargo run --example truncation_spectrum
//! ```

use jacobi::spectra::{
    delta_expansion, eigenvalues, eigenvector, f_bound, interlacing, residual_split, spectrum_rows, truncate,
};
use jacobi::{presets, Exponent};

pub fn run_example() -> jacobi::Result<()> {
    // The free operator has eigenvalues 2 cos(kπ/(N+1)).
    let n = 8;
    let free = truncate(&presets::free()?, n)?;
    let ev = eigenvalues(&free, 1e-14)?;
    for (k, l) in ev.iter().enumerate() {
        let exact = 2.0 * ((n - k) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
        println!("free N={n}: lambda_{} = {l:+.12} (closed form {exact:+.12})", k + 1);
        assert!((l - exact).abs() < 1e-12);
    }

    let spec = presets::ex_b1(Exponent::from_integer(2))?;
    let t = truncate(&spec, 10)?;
    println!("\nex-B1 N=10: lambda, delta_N, delta_N by expansion (m=3), bound F_3");
    for l in eigenvalues(&t, 1e-13)?.into_iter().take(5) {
        let pair = eigenvector(&t, l)?;
        let expanded = delta_expansion(&t, &pair, 3)?;
        let bound = f_bound(&t, l, 3)?;
        println!("  {l:>12.6} {:>12.4e} {expanded:>12.4e} {bound:>12.4e}", pair.last_coord);
        assert!(pair.last_coord.abs() <= bound * (1.0 + 1e-12));
        let split = residual_split(&t, &pair, l + 1.0);
        assert!((split.term1 - 1.0).abs() < 1e-9);
    }

    let rows = spectrum_rows(&spec, 40, (0.0, 50.0), 1e-12)?;
    println!("\nex-B1 N=40 inside [0, 50]:");
    for r in &rows {
        println!("  lambda = {:>10.6}  log10(a_N |delta_N|) = {:>8.2}", r.lambda, r.log10_a_n_delta_n);
    }

    let il = interlacing(&spec, 40, 1e-12)?;
    println!(
        "\ninterlacing N=40 vs N=41: resolved {}, certified {}, violations {:?}",
        il.resolved, il.certified, il.violations
    );
    assert!(il.holds());
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
