//! Orthogonal polynomials at `z = i`: the Christoffel–Darboux identity and
//! whether `Σ |p_n(i)|²` keeps growing.
//!
//! ```text
//! cargo run --example christoffel_darboux
//! ```

use jacobi::coeffseq::CoefficientSpec;
use jacobi::orthopoly::{cd0_check, cd_check, cd_sweep, eval_poly, sumsq_vi, Trend};
use jacobi::{presets, Exponent};
use num_complex::Complex64;

pub fn run_example() -> jacobi::Result<()> {
    let spec = presets::ex_b1(Exponent::from_integer(2))?;
    let p = eval_poly(&spec, 6, Complex64::new(0.5, 0.0))?;
    for k in 0..=6 {
        println!("p_{k}(0.5) = {:+.6e}", p.value(k).re);
    }

    for n in [1, 10, 100, 1000] {
        let c = cd_check(&spec, n)?;
        println!("n = {n:>4}: lhs {:.12e}  rhs {:.12e}  (scaled by e^{:.1})", c.lhs, c.rhs, c.ln_scale);
        assert!(c.ok && cd0_check(&spec, n)?);
    }
    assert_eq!(cd_sweep(&spec, 1000, 1e-9)?, None);

    let free = sumsq_vi(&presets::free()?, 200)?;
    println!("free: trend {:?}, ln partial sum at 200 = {:.2}", free.trend, free.ln_partial_sums[199]);
    assert_eq!(free.trend, Trend::Growing);

    // Fast geometric growth of a_n with b_n = 0 makes the sum converge.
    let a: Vec<f64> = (1..=120).map(|n| 100f64.powi(n)).collect();
    let geometric = CoefficientSpec::tabulated(&a, &vec![0.0; 120])?;
    let s = sumsq_vi(&geometric, 100)?;
    println!("a_n = 100^n: trend {:?}, partial sum at 100 = {:.6}", s.trend, s.partial_sums()[99]);
    assert_eq!(s.trend, Trend::Saturated);
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
