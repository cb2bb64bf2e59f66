//! Direct numeric evaluation of the ratio sums `G⁺`, `G` and `G̃`.

use serde::{Deserialize, Serialize};

use crate::coeffseq::CoefficientSpec;
use crate::multiindex::{self, Variant};
use crate::{Error, Result};

/// The per-index ratios `γ_n^∓ = a_{n-1}/|b_n|, a_n/|b_n|` and, at a given
/// `λ`, `|c_n^∓(λ)| = a_{n-1}/|λ - b_n|, a_n/|λ - b_n|`. A vanishing
/// denominator gives `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioFactors {
    #[serde(with = "crate::report::extended")]
    pub gamma_minus: f64,
    #[serde(with = "crate::report::extended")]
    pub gamma_plus: f64,
    #[serde(with = "crate::report::extended_opt")]
    pub c_abs_minus: Option<f64>,
    #[serde(with = "crate::report::extended_opt")]
    pub c_abs_plus: Option<f64>,
}

fn safe_div(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub fn ratio_factors(spec: &CoefficientSpec, n: u64, lambda: Option<f64>) -> Result<RatioFactors> {
    if n == 0 {
        return Err(Error::Argument("index must be >= 1".into()));
    }
    let (c_abs_minus, c_abs_plus) = match lambda {
        None => (None, None),
        Some(l) => {
            let a_prev = if n == 1 { 0.0 } else { spec.eval_a(n - 1)? };
            let den = (l - spec.eval_b(n)?).abs();
            (Some(safe_div(a_prev, den)), Some(safe_div(spec.eval_a(n)?, den)))
        }
    };
    Ok(RatioFactors { gamma_minus: spec.ratio(n - 1, n), gamma_plus: spec.ratio(n, n), c_abs_minus, c_abs_plus })
}

fn require_past_depth(m: usize, n: u64) -> Result<()> {
    if n <= m as u64 {
        return Err(Error::Argument(format!("index n = {n} must exceed the depth m = {m}")));
    }
    Ok(())
}

fn product(mut p: f64, f: f64) -> f64 {
    p *= f;
    if p.is_nan() {
        f64::INFINITY
    } else {
        p
    }
}

/// `G⁺_{m,n} = Σ_{I_m⁺} Π_s a_{n-k_s}/|b_{n-j_s}|`, for `n > m`.
pub fn g_plus(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    require_past_depth(m, n)?;
    let n = n as i64;
    let mut sum = 0.0;
    multiindex::for_each(Variant::IPlus, m, |j, k| {
        let t = (0..m).fold(1.0, |p, s| product(p, spec.ratio((n - k[s] as i64) as u64, (n - j[s] as i64) as u64)));
        sum += t;
    })?;
    Ok(sum)
}

/// `G_{m,n}`, the same product summed over the full set `I_m`, for `n > m`.
pub fn g_full(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    require_past_depth(m, n)?;
    let n = n as i64;
    let mut sum = 0.0;
    multiindex::for_each(Variant::I, m, |j, k| {
        let t = (0..m).fold(1.0, |p, s| product(p, spec.ratio((n - k[s] as i64) as u64, (n - j[s] as i64) as u64)));
        sum += t;
    })?;
    Ok(sum)
}

/// `G̃_{m,n} = Σ_{Î_m} Π_s a²_{n+j_{m+1}-k_s} / b²_{n+j_{m+1}-j_s}`, with
/// `a_k = 0` for `k <= 0`.
pub fn g_tilde(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("index must be >= 1".into()));
    }
    let n = n as i64;
    let mut sum = 0.0;
    multiindex::for_each(Variant::IHat, m, |j, k| {
        let shift = n + j[m] as i64;
        if (0..m).any(|s| shift - (k[s] as i64) <= 0) {
            return;
        }
        let t = (0..m).fold(1.0, |p, s| {
            let r = spec.ratio((shift - k[s] as i64) as u64, (shift - j[s] as i64) as u64);
            product(p, r * r)
        });
        sum += t;
    })?;
    Ok(sum)
}

/// `a_n · g`, formed in log space when `a_n` itself is not representable.
pub(crate) fn times_a(spec: &CoefficientSpec, n: u64, g: f64) -> Result<f64> {
    if g == 0.0 || g.is_infinite() {
        return Ok(g);
    }
    match spec.eval_a(n) {
        Ok(a) if (a * g).is_normal() => Ok(a * g),
        _ => Ok((spec.ln_a(n)? + g.ln()).exp()),
    }
}

/// `a_n · G⁺_{m,n}`.
pub fn g_plus_times_a(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    times_a(spec, n, g_plus(spec, m, n)?)
}

/// `a_n · G_{m,n}`.
pub fn g_full_times_a(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    times_a(spec, n, g_full(spec, m, n)?)
}

pub(crate) fn rel_close(x: f64, y: f64, rtol: f64) -> bool {
    if x == y {
        return true;
    }
    if !(x.is_finite() && y.is_finite()) {
        return false;
    }
    (x - y).abs() <= rtol * x.abs().max(y.abs())
}

/// Checks `G̃_{m+1,n} = (a²_{n-1}/b²_{n-1}) G̃_{m,n-1} + (a²_n/b²_{n+1}) G̃_{m,n+1}`
/// to relative `1e-12`.
pub fn recursion_check_g_tilde(spec: &CoefficientSpec, m: usize, n: u64) -> Result<bool> {
    if m == 0 || n < 2 {
        return Err(Error::Argument("recursion check needs m >= 1 and n >= 2".into()));
    }
    let lhs = g_tilde(spec, m + 1, n)?;
    let down = spec.ratio(n - 1, n - 1).powi(2);
    let up = spec.ratio(n, n + 1).powi(2);
    let term = |w: f64, g: f64| if w == 0.0 || g == 0.0 { 0.0 } else { w * g };
    let rhs = term(down, g_tilde(spec, m, n - 1)?) + term(up, g_tilde(spec, m, n + 1)?);
    Ok(rel_close(lhs, rhs, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exponent;

    fn power(ea: i64, eb: i64) -> CoefficientSpec {
        CoefficientSpec::power(1.0, Exponent::from_integer(ea), 1.0, Exponent::from_integer(eb)).unwrap()
    }

    fn constant(a: f64, b: f64) -> CoefficientSpec {
        CoefficientSpec::power(a, Exponent::from_integer(0), b, Exponent::from_integer(0)).unwrap()
    }

    #[test]
    fn g_plus_small_cases() {
        assert!((g_plus(&power(1, 2), 1, 10).unwrap() - 0.09).abs() < 1e-15);
        assert_eq!(g_plus(&constant(1.0, 1.0), 2, 3).unwrap(), 2.0);
        assert!(g_plus(&constant(1.0, 1.0), 3, 3).is_err());
    }

    #[test]
    fn g_plus_depth_three_scaling() {
        let v = g_plus_times_a(&power(2, 3), 3, 100).unwrap();
        // a_n G⁺_3 ~ 3 n^-1 for a = n², b = n³
        assert!((v / 0.03 - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn g_full_small_cases() {
        assert_eq!(g_full(&power(1, 0), 1, 5).unwrap(), 9.0);
        assert_eq!(g_full(&constant(1.0, 1.0), 2, 3).unwrap(), 4.0);
        let s = power(2, 3);
        let a = |n: u64| s.eval_a(n).unwrap();
        let b = |n: u64| s.eval_b(n).unwrap();
        let expect = a(9) * (a(8) + a(9)) / (b(10) * b(9)) + a(10) * (a(10) + a(11)) / (b(10) * b(11));
        assert!(rel_close(g_full(&s, 2, 10).unwrap(), expect, 1e-13));
    }

    #[test]
    fn g_tilde_small_cases() {
        assert_eq!(g_tilde(&constant(1.0, 2.0), 1, 3).unwrap(), 0.5);
        let s = power(1, 2);
        assert_eq!(g_tilde(&s, 1, 1).unwrap(), s.ratio(1, 2).powi(2));
        assert_eq!(g_tilde(&constant(1.0, 2.0), 2, 5).unwrap(), 0.25);
    }

    #[test]
    fn recursion_holds_on_examples() {
        assert!(recursion_check_g_tilde(&constant(1.0, 2.0), 1, 5).unwrap());
        assert!(recursion_check_g_tilde(&power(1, 2), 2, 7).unwrap());
    }

    #[test]
    fn vanishing_b_gives_infinite_sums() {
        let s = constant(1.0, 1.0);
        let z = CoefficientSpec::tabulated(&[1.0; 10], &[1.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(g_plus(&z, 1, 3).unwrap(), f64::INFINITY);
        assert!(g_plus(&s, 1, 3).unwrap().is_finite());
        let r = ratio_factors(&z, 3, Some(0.0)).unwrap();
        assert_eq!(r.gamma_plus, f64::INFINITY);
        assert_eq!(r.c_abs_minus, Some(f64::INFINITY));
    }
}
