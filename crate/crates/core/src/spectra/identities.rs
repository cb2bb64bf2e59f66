use serde::{Deserialize, Serialize};

use super::{EigenPair, Truncation};
use crate::dd::Dd;
use crate::multiindex::{self, Variant};
use crate::{Error, Result};

/// `‖(T - λ) x_N‖² = (λ - λ_N)² + a_N² δ_N²`, split into its two terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSplit {
    pub total: f64,
    pub term1: f64,
    pub term2: f64,
}

pub fn residual_split(t: &Truncation, pair: &EigenPair, lambda: f64) -> ResidualSplit {
    let term1 = (lambda - pair.lambda).powi(2);
    let term2 = (t.edge * pair.last_coord).powi(2);
    ResidualSplit { total: term1 + term2, term1, term2 }
}

/// `‖(T - λ) x‖²` with `x` embedded in the first `N + 1` coordinates and the
/// band action of `T` applied row by row.
pub fn embedded_residual_sq(t: &Truncation, pair: &EigenPair, lambda: f64) -> f64 {
    let n = t.len();
    let x = |k: usize| if (1..=n).contains(&k) { pair.vector[k - 1] } else { 0.0 };
    (1..=n + 1)
        .map(|k| {
            let b = if k <= n { t.b(k) } else { 0.0 };
            let up = if k <= n { t.a(k) * x(k + 1) } else { 0.0 };
            let row = t.a(k - 1) * x(k - 1) + (b - lambda) * x(k) + up;
            row * row
        })
        .sum()
}

fn check_pivots(t: &Truncation, lambda: f64, m: usize) -> Result<()> {
    let n = t.len();
    if m == 0 || m > n {
        return Err(Error::Argument(format!("expansion depth must lie in 1..={n}, got {m}")));
    }
    for j in 0..m {
        let b = t.b(n - j);
        if (lambda - b).abs() <= 1e-12 * (lambda.abs() + b.abs() + 1.0) {
            return Err(Error::DegeneratePivot { j });
        }
    }
    Ok(())
}

/// The eigenpair carried to double-double precision: one Rayleigh quotient
/// step for `λ`, then a twisted solve at the new `λ` with the twist at the
/// largest component. Falls back to the stored vector if a ratio vanishes.
fn refine(t: &Truncation, pair: &EigenPair) -> (Dd, Vec<Dd>) {
    let n = t.len();
    let v = &pair.vector;
    let dd = Dd::from;
    let stored = || v.iter().map(|&x| dd(x)).collect::<Vec<_>>();
    if n == 1 {
        return (dd(t.b(1)), stored());
    }
    let (mut num, mut den) = (dd(0.0), dd(0.0));
    for k in 1..=n {
        let mut row = (dd(t.b(k)) - pair.lambda) * v[k - 1];
        if k > 1 {
            row += dd(t.a(k - 1)) * v[k - 2];
        }
        if k < n {
            row += dd(t.a(k)) * v[k];
        }
        num += row * v[k - 1];
        den += dd(v[k - 1]) * v[k - 1];
    }
    let lambda = dd(pair.lambda) + num / den;
    let shift = |k: usize| lambda - t.b(k);
    let r = (1..=n).max_by(|&i, &j| v[i - 1].abs().total_cmp(&v[j - 1].abs())).expect("nonempty");
    let mut x = vec![dd(0.0); n];
    x[r - 1] = dd(1.0);
    let mut ratio = dd(0.0);
    let mut up = Vec::with_capacity(r);
    for k in 1..r {
        ratio = if k == 1 { shift(1) / t.a(1) } else { (shift(k) - dd(t.a(k - 1)) / ratio) / t.a(k) };
        up.push(ratio);
    }
    for k in (1..r).rev() {
        x[k - 1] = x[k] / up[k - 1];
    }
    for k in (r + 1..=n).rev() {
        ratio = if k == n { shift(n) / t.a(n - 1) } else { (shift(k) - dd(t.a(k)) / ratio) / t.a(k - 1) };
        x[k - 1] = ratio;
    }
    for k in r + 1..=n {
        x[k - 1] = x[k - 2] / x[k - 1];
    }
    if !x.iter().all(|c| c.is_finite()) {
        return (lambda, stored());
    }
    let norm = x.iter().fold(dd(0.0), |s, &c| s + c * c).sqrt();
    let dot = x.iter().zip(v).fold(dd(0.0), |s, (&c, &w)| s + c * w);
    let scale = if dot.hi < 0.0 { -norm } else { norm };
    (lambda, x.into_iter().map(|c| c / scale).collect())
}

/// `Σ_{Î_m⁺} Π_s a_{N-k_s}/(λ_N - b_{N-j_s}) · δ_{N-j_{m+1}}` with
/// `δ_0 = 0`, which reproduces `δ_N` for an eigenpair. Small pivots
/// `λ_N - b_{N-j}` amplify rounding in the stored vector, so the sum is
/// formed in double-double arithmetic on the refined eigenpair.
pub fn delta_expansion(t: &Truncation, pair: &EigenPair, m: usize) -> Result<f64> {
    check_pivots(t, pair.lambda, m)?;
    let n = t.len() as i64;
    let (lambda, x) = refine(t, pair);
    let mut sum = Dd::ZERO;
    multiindex::for_each(Variant::IHatPlus, m, |j, k| {
        let tail = n - j[m] as i64;
        if tail < 1 {
            return;
        }
        let mut p = x[tail as usize - 1];
        for s in 0..m {
            p = p * t.a((n - k[s] as i64) as usize) / (lambda - t.b((n - j[s] as i64) as usize));
        }
        sum += p;
    })?;
    Ok(sum.hi)
}

/// `F_{m,N} = Σ_{I_m⁺} Π_s a_{N-k_s}/|λ - b_{N-j_s}|`, an upper bound for
/// `|δ_N|` at an eigenvalue `λ`. `F_0 = 1`, and an exactly vanishing
/// denominator makes the bound `+∞`.
pub fn f_bound(t: &Truncation, lambda: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    let n = t.len() as i64;
    if m as i64 > n {
        return Err(Error::Argument(format!("bound depth must lie in 0..={n}, got {m}")));
    }
    let mut sum = 0.0;
    multiindex::for_each(Variant::IPlus, m, |j, k| {
        let mut p = 1.0;
        for s in 0..m {
            let num = t.a((n - k[s] as i64) as usize);
            let den = (lambda - t.b((n - j[s] as i64) as usize)).abs();
            p *= if num == 0.0 {
                0.0
            } else if den == 0.0 {
                f64::INFINITY
            } else {
                num / den
            };
        }
        sum += if p.is_nan() { f64::INFINITY } else { p };
    })?;
    Ok(sum)
}
