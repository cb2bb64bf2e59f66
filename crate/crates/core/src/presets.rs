//! Built-in coefficient families: the free Jacobi matrix and the worked
//! examples of the power-law, parity, recursive and sparse-override kinds.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::coeffseq::{
    Branch, BranchRule, CoefficientSpec, Override, RecursionBase, RecursiveRule, SequenceRule, Sign,
};
use crate::{Error, Exponent, Result};

fn branches(rule: BranchRule) -> SequenceRule {
    SequenceRule::Branches(rule)
}

fn single(e: Exponent) -> Result<SequenceRule> {
    Ok(branches(BranchRule::single(Branch::power(1.0, e)?)))
}

/// `a_n = 1`, `b_n = 0`.
pub fn free() -> Result<CoefficientSpec> {
    CoefficientSpec::new(single(Exponent::zero())?, branches(BranchRule::single(Branch::zero())))
}

/// `a_n = n^α`, `b_n = n^{α+1}`.
pub fn ex_b1(alpha: Exponent) -> Result<CoefficientSpec> {
    CoefficientSpec::new(single(alpha)?, single(alpha + Exponent::one())?)
}

/// Same coefficients as [`ex_b1`], examined through the `ℭ_m` family.
pub fn ex_c1(alpha: Exponent) -> Result<CoefficientSpec> {
    ex_b1(alpha)
}

/// `a_n = n^α` for even `n` and `n^{-α}` for odd `n`; `b_n = n^{α-1}`.
pub fn ex_b2(alpha: Exponent) -> Result<CoefficientSpec> {
    let a = BranchRule::periodic(vec![Branch::power(1.0, alpha)?, Branch::power(1.0, -alpha)?])?;
    CoefficientSpec::new(branches(a), single(alpha - Exponent::one())?)
}

/// `a_n = n^{1/α}`, `b_n = 1`.
pub fn ex_c2(alpha: Exponent) -> Result<CoefficientSpec> {
    if alpha.is_zero() {
        return Err(Error::Argument("alpha must be nonzero".into()));
    }
    CoefficientSpec::new(single(alpha.recip())?, single(Exponent::zero())?)
}

/// `a_1 = b_1 = 1`; `a_n = a_{n-1}` when `q | n` and `a_n = n^{q+1} a_{n-1}`
/// otherwise; `b_n = n^q a_{n-1}`.
pub fn ex_d(q: u32) -> Result<CoefficientSpec> {
    if q < 2 {
        return Err(Error::Argument(format!("q must be at least 2, got {q}")));
    }
    let grow = Branch::power(1.0, Exponent::from_integer(q as i64 + 1))?;
    let mut factors = vec![grow; q as usize];
    factors[0] = Branch::power(1.0, Exponent::zero())?;
    let a = RecursiveRule::new(1.0, factors, RecursionBase::Previous)?;
    let b =
        RecursiveRule::new(1.0, vec![Branch::power(1.0, Exponent::from_integer(q as i64))?], RecursionBase::PreviousA)?;
    CoefficientSpec::new(SequenceRule::Recursive(a), SequenceRule::Recursive(b))
}

/// `a_n = n^α`; `b_n = n^β` for even `n` and `n^γ` for odd `n`.
pub fn ex_b_comp(alpha: Exponent, beta: Exponent, gamma: Exponent) -> Result<CoefficientSpec> {
    let b = BranchRule::periodic(vec![Branch::power(1.0, beta)?, Branch::power(1.0, gamma)?])?;
    CoefficientSpec::new(single(alpha)?, branches(b))
}

/// `a_n = n^α`; `b_n = base^n` on the perfect squares and `n^β` elsewhere.
pub fn ex_c_comp(alpha: Exponent, beta: Exponent, base: f64) -> Result<CoefficientSpec> {
    let b = BranchRule::single(Branch::power(1.0, beta)?)
        .with_override(Override::Squares { base, sign: Sign::Positive })?;
    CoefficientSpec::new(single(alpha)?, branches(b))
}

/// A named preset with its tunable parameters and their defaults.
#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, &'static str)],
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "free", summary: "a_n = 1, b_n = 0", params: &[] },
    Preset { name: "ex-B1", summary: "a_n = n^alpha, b_n = n^(alpha+1)", params: &[("alpha", "2")] },
    Preset { name: "ex-B2", summary: "a_n = n^(+-alpha) by parity, b_n = n^(alpha-1)", params: &[("alpha", "3")] },
    Preset { name: "ex-C1", summary: "a_n = n^alpha, b_n = n^(alpha+1)", params: &[("alpha", "3")] },
    Preset { name: "ex-C2", summary: "a_n = n^(1/alpha), b_n = 1", params: &[("alpha", "4")] },
    Preset { name: "ex-D", summary: "multiplicative recursion, b_n = n^q a_(n-1)", params: &[("q", "2")] },
    Preset {
        name: "ex-B-comp",
        summary: "a_n = n^alpha, b_n = n^beta (even n), n^gamma (odd n)",
        params: &[("alpha", "3"), ("beta", "4"), ("gamma", "5")],
    },
    Preset {
        name: "ex-C-comp",
        summary: "a_n = n^alpha, b_n = b^n on squares and n^beta elsewhere",
        params: &[("alpha", "2"), ("beta", "3"), ("b", "1/2")],
    },
];

/// Parses `"3"`, `"-17/4"` or `"4.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Exponent> {
    let t = text.trim();
    let bad = || Error::Argument(format!("cannot parse {text:?} as a rational number"));
    if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        return crate::coeffseq::exponent(num, den);
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs().checked_mul(den).and_then(|w| w.checked_add(f)).ok_or_else(bad)?;
        return Ok(Exponent::new(if negative { -mag } else { mag }, den));
    }
    t.parse::<i64>().map(Exponent::from_integer).map_err(|_| bad())
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Builds a preset, overriding defaults with `params`.
pub fn build(name: &str, params: &BTreeMap<String, Exponent>) -> Result<CoefficientSpec> {
    let preset = find(name).ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
    for k in params.keys() {
        if !preset.params.iter().any(|(p, _)| p == k) {
            return Err(Error::Config(format!("preset {name} has no parameter {k:?}")));
        }
    }
    let get = |key: &str| -> Result<Exponent> {
        match params.get(key) {
            Some(v) => Ok(*v),
            None => {
                let (_, default) = preset.params.iter().find(|(p, _)| *p == key).expect("declared parameter");
                parse_rational(default)
            }
        }
    };
    let float = |e: Exponent| *e.numer() as f64 / *e.denom() as f64;
    match name {
        "free" => free(),
        "ex-B1" => ex_b1(get("alpha")?),
        "ex-B2" => ex_b2(get("alpha")?),
        "ex-C1" => ex_c1(get("alpha")?),
        "ex-C2" => ex_c2(get("alpha")?),
        "ex-D" => {
            let q = get("q")?;
            if !q.is_integer() || *q.numer() < 2 || *q.numer() > 16 {
                return Err(Error::Config(format!("q must be an integer in 2..=16, got {q}")));
            }
            ex_d(*q.numer() as u32)
        }
        "ex-B-comp" => ex_b_comp(get("alpha")?, get("beta")?, get("gamma")?),
        "ex-C-comp" => ex_c_comp(get("alpha")?, get("beta")?, float(get("b")?)),
        _ => unreachable!("registry and builder list the same names"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("17/4").unwrap(), Exponent::new(17, 4));
        assert_eq!(parse_rational("4.25").unwrap(), Exponent::new(17, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), Exponent::new(-1, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), Exponent::from_integer(3));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn every_preset_builds_with_defaults() {
        for p in PRESETS {
            let s = build(p.name, &BTreeMap::new()).unwrap();
            assert!(s.eval_a(7).unwrap() > 0.0, "{}", p.name);
        }
    }

    #[test]
    fn parameters_override_defaults() {
        let mut params = BTreeMap::new();
        params.insert("alpha".to_string(), Exponent::from_integer(1));
        let s = build("ex-B1", &params).unwrap();
        assert_eq!(s.eval_b(3).unwrap(), 9.0);
        params.insert("zeta".to_string(), Exponent::from_integer(1));
        assert!(build("ex-B1", &params).is_err());
        assert!(build("nope", &BTreeMap::new()).is_err());
    }

    #[test]
    fn parity_example_values() {
        let s = ex_b2(Exponent::from_integer(3)).unwrap();
        assert_eq!(s.eval_a(2).unwrap(), 8.0);
        assert_eq!(s.eval_b(3).unwrap(), 9.0);
    }
}
