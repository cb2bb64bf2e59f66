//! Self-adjointness criteria on every preset, decided in exact rational
//! arithmetic where the coefficients are power laws.
//!
//! ```text
//! cargo run --release --example criteria_battery
//! ```

use std::collections::BTreeMap;

use jacobi::conditions::{check_bm, run_battery, Conclusion, NumericRange, Outcome};
use jacobi::{presets, Exponent};

fn mark(o: Outcome) -> char {
    match o {
        Outcome::Holds => '+',
        Outcome::Fails => '-',
        Outcome::Inconclusive => '?',
    }
}

pub fn run_example() -> jacobi::Result<()> {
    let range = NumericRange::default();
    for p in presets::PRESETS {
        let spec = presets::build(p.name, &BTreeMap::new())?;
        let battery = run_battery(&spec, 6, &range)?;
        let line: String = battery
            .verdicts
            .iter()
            .map(|v| match v.m {
                Some(m) => format!("{}{m}{} ", &v.criterion.id()[..1], mark(v.outcome)),
                None => format!("{}{} ", v.criterion.id(), mark(v.outcome)),
            })
            .collect();
        let witnesses: Vec<String> = battery
            .witnesses
            .iter()
            .map(|w| match w.m {
                Some(m) => format!("{}(m={m})", w.criterion.id()),
                None => w.criterion.id().to_string(),
            })
            .collect();
        println!("{:<10} {:?} via [{}]", p.name, battery.conclusion, witnesses.join(", "));
        println!("           {line}");
        assert_eq!(battery.conclusion, Conclusion::SelfAdjoint, "{}", p.name);
    }

    // Sweeping alpha in ex-B1 moves the first depth at which B_m holds.
    println!("\nex-B1: first m with B_m holding");
    for alpha in ["1/2", "1", "2", "7/2", "5"] {
        let spec = presets::ex_b1(presets::parse_rational(alpha)?)?;
        let mut first = None;
        for m in 1..=8 {
            if check_bm(&spec, m, &range)?.outcome == Outcome::Holds {
                first = Some(m);
                break;
            }
        }
        println!("  alpha = {alpha:<4} -> {first:?}");
        let a = presets::parse_rational(alpha)?;
        assert_eq!(first, Some((a.floor() + Exponent::from_integer(1)).to_integer() as usize));
    }
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
