//! Building coefficient sequences: presets, direct construction and JSON
//! documents, with their exact power-law exponents.
//!
//! ```text
//! cargo run --example coefficients
//! ```

use std::collections::BTreeMap;

use jacobi::coeffseq::{CoefficientSpec, Which};
use jacobi::{presets, Exponent};

pub fn run_example() -> jacobi::Result<()> {
    let alpha = presets::parse_rational("5/2")?;
    let b1 = presets::ex_b1(alpha)?;
    println!("ex-B1 with alpha = {alpha}");
    println!("{:>4} {:>14} {:>14}", "n", "a_n", "b_n");
    for n in [1, 2, 3, 10, 100] {
        println!("{n:>4} {:>14.6e} {:>14.6e}", b1.eval_a(n)?, b1.eval_b(n)?);
    }
    let ea = b1.asymptotic_exponent(Which::A, 0);
    let eb = b1.asymptotic_exponent(Which::B, 0);
    println!("exponents: a ~ n^{}, b ~ n^{}", ea.unwrap(), eb.unwrap());
    assert_eq!(eb, Some(alpha + Exponent::from_integer(1)));

    // Parity-split sequences carry one exponent per residue class.
    let b2 = presets::ex_b2(Exponent::from_integer(3))?;
    for r in 0..2 {
        println!("ex-B2 class {r} (mod 2): a ~ n^{}", b2.asymptotic_exponent(Which::A, r).unwrap());
    }

    // A geometric override on perfect squares removes the pure power law.
    let mut params = BTreeMap::new();
    params.insert("b".to_string(), presets::parse_rational("1/3")?);
    let comp = presets::build("ex-C-comp", &params)?;
    println!("ex-C-comp: b_9 = {:.6e}, b_10 = {:.6e}", comp.eval_b(9)?, comp.eval_b(10)?);
    assert_eq!(comp.asymptotic_exponent(Which::B, 0), None);

    // The multiplicative recursion grows faster than any power, so only
    // logarithms stay representable far out.
    let d = presets::ex_d(2)?;
    println!("ex-D: ln a_50 = {:.3}, ln a_5000 = {:.3}", d.ln_a(50)?, d.ln_a(5000)?);

    let custom = CoefficientSpec::from_json(
        r#"{
          "a": { "modulus": 1, "branches": [
            { "residue": 0, "constant": 2.0, "exponent_num": 3, "exponent_den": 2 } ] },
          "b": { "modulus": 2, "branches": [
            { "residue": 0, "constant": 1.0, "exponent_num": 1, "exponent_den": 1, "sign": 1 },
            { "residue": 1, "constant": 1.0, "exponent_num": 1, "exponent_den": 1, "sign": -1 } ] }
        }"#,
    )?;
    println!("JSON spec: a_4 = {}, b_3 = {}, b_4 = {}", custom.eval_a(4)?, custom.eval_b(3)?, custom.eval_b(4)?);
    assert_eq!(custom.eval_a(4)?, 16.0);
    assert_eq!(custom.eval_b(3)?, -3.0);

    let direct = CoefficientSpec::power(2.0, Exponent::new(3, 2), 1.0, Exponent::from_integer(1))?;
    assert_eq!(direct.eval_a(9)?, custom.eval_a(9)?);
    println!(
        "round trip: {}",
        serde_json::to_string(&custom.to_document()).map_err(|e| jacobi::Error::Config(e.to_string()))?
    );
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
