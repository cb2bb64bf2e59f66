//! Orthonormal polynomials `p_n` of the Jacobi matrix and the
//! Christoffel–Darboux diagnostics at `z = i`.
//!
//! `p_0 = 0`, `p_1 = 1` and `a_n p_{n+1} = (x - b_n) p_n - a_{n-1} p_{n-1}`.
//! Values are stored with a running logarithmic scale so that sequences
//! spanning thousands of orders of magnitude stay representable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffseq::CoefficientSpec;
use crate::dd::Dd;
use crate::report::sci;
use crate::spectra::{eigenvalues, truncate, Truncation};
use crate::{Error, Result};

const RESCALE: f64 = 3.273390607896142e150; // 2^500
const LN_RESCALE: f64 = 500.0 * std::f64::consts::LN_2;

/// `p_1(x), …, p_n(x)` where the true value of entry `k` is
/// `values[k] · exp(ln_scale[k])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySequence {
    pub x: Complex64,
    pub values: Vec<Complex64>,
    pub ln_scale: Vec<f64>,
}

impl PolySequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `p_k(x)` for `k <= len`, infinite when not representable.
    pub fn value(&self, k: usize) -> Complex64 {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = self.ln_scale[k - 1];
        if s == 0.0 {
            self.values[k - 1]
        } else {
            self.values[k - 1] * s.exp()
        }
    }

    /// `ln |p_k(x)|`.
    pub fn ln_abs(&self, k: usize) -> f64 {
        if k == 0 {
            return f64::NEG_INFINITY;
        }
        self.values[k - 1].norm().ln() + self.ln_scale[k - 1]
    }

    /// Accumulated scale of the last entry.
    pub fn scale_log(&self) -> f64 {
        self.ln_scale.last().copied().unwrap_or(0.0)
    }
}

/// Coefficients `a_1..a_n` and `b_1..b_n`.
struct Coefs {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Coefs {
    fn load(spec: &CoefficientSpec, n: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for k in 1..=n as u64 {
            a.push(spec.eval_a(k)?);
            b.push(spec.eval_b(k)?);
        }
        Ok(Self { a, b })
    }
}

fn recur(c: &Coefs, n_max: usize, x: Complex64) -> PolySequence {
    let mut values = Vec::with_capacity(n_max);
    let mut ln_scale = Vec::with_capacity(n_max);
    let (mut prev, mut cur, mut scale) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), 0.0);
    values.push(cur);
    ln_scale.push(0.0);
    for k in 1..n_max {
        let a_prev = if k == 1 { 0.0 } else { c.a[k - 2] };
        let next = ((x - c.b[k - 1]) * cur - prev * a_prev) / c.a[k - 1];
        prev = cur;
        cur = next;
        if cur.norm() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += LN_RESCALE;
        }
        values.push(cur);
        ln_scale.push(scale);
    }
    PolySequence { x, values, ln_scale }
}

/// `p_1(x)..p_{n_max}(x)` by the forward recurrence.
pub fn eval_poly(spec: &CoefficientSpec, n_max: usize, x: Complex64) -> Result<PolySequence> {
    if n_max == 0 {
        return Err(Error::Argument("n_max must be >= 1".into()));
    }
    let c = Coefs::load(spec, n_max.saturating_sub(1).max(1))?;
    Ok(recur(&c, n_max, x))
}

/// `|a_k p_{k+1} + b_k p_k + a_{k-1} p_{k-1} - x p_k|` relative to the
/// size of the terms, for `2 <= k < len`.
pub fn recurrence_residual(spec: &CoefficientSpec, seq: &PolySequence, k: usize) -> Result<f64> {
    if k < 2 || k + 1 > seq.len() {
        return Err(Error::Argument(format!("interior index must lie in 2..{}", seq.len())));
    }
    let s = seq.ln_scale[k - 1];
    let at = |i: usize| seq.values[i - 1] * (seq.ln_scale[i - 1] - s).exp();
    let (a_prev, a, b) = (spec.eval_a(k as u64 - 1)?, spec.eval_a(k as u64)?, spec.eval_b(k as u64)?);
    let terms = [at(k + 1) * a, at(k) * b, at(k - 1) * a_prev, -seq.x * at(k)];
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let r = terms.iter().sum::<Complex64>().norm();
    Ok(if scale == 0.0 { 0.0 } else { r / scale })
}

/// Both sides of `Σ_{k<=n} |v_k|² = a_n Im(v_{n+1} conj(v_n))` with
/// `v_k = p_k(i)`, each divided by `exp(ln_scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_scale: f64,
    pub ok: bool,
}

fn v_sequence(spec: &CoefficientSpec, n_max: usize) -> Result<(Coefs, PolySequence)> {
    let c = Coefs::load(spec, n_max)?;
    let seq = recur(&c, n_max + 1, Complex64::i());
    Ok((c, seq))
}

/// Power-of-two rescaling step for the double-double recurrence, small
/// enough that squares and products with the coefficients stay finite.
const DD_RESCALE_EXP: i32 = 128;

/// Per-`n` data of the recurrence at `z = i`, carried in double-double
/// arithmetic. The right-hand side `a_n Im(v_{n+1} conj v_n)` is a small
/// difference of large products once `|b_n|` grows, so plain `f64` loses
/// roughly `log10 |b_n|` digits there.
struct CdStep {
    /// `Σ_{k<=n} |v_k|²` and `a_n Im(v_{n+1} conj v_n)`, both divided by
    /// `4^scale`.
    lhs: Dd,
    rhs: Dd,
    /// `a_n |v_n| |v_{n+1}|`, divided by `4^scale`.
    cd0: f64,
    /// Power of two removed from each `v_k` so far.
    scale: i32,
}

fn cd_steps(c: &Coefs, n_max: usize) -> Vec<CdStep> {
    let zero = Dd::ZERO;
    let (mut px, mut py) = (zero, zero);
    let (mut x, mut y) = (Dd::ONE, zero);
    let mut sum = Dd::ONE;
    let mut scale = 0i32;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (a, b) = (c.a[n - 1], c.b[n - 1]);
        let a_prev = if n == 1 { 0.0 } else { c.a[n - 2] };
        let nx = (-(x * b) - y - px * a_prev) / a;
        let ny = (x - y * b - py * a_prev) / a;
        let rhs = (ny * x - nx * y) * a;
        let cur_sq = (x * x + y * y).hi;
        let next_sq = (nx * nx + ny * ny).hi;
        out.push(CdStep { lhs: sum, rhs, cd0: a * cur_sq.sqrt() * next_sq.sqrt(), scale });
        (px, py, x, y) = (x, y, nx, ny);
        sum += x * x + y * y;
        if x.hi.abs().max(y.hi.abs()) > 2f64.powi(DD_RESCALE_EXP) {
            for v in [&mut px, &mut py, &mut x, &mut y] {
                *v = v.scale(2f64.powi(-DD_RESCALE_EXP));
            }
            sum = sum.scale(2f64.powi(-2 * DD_RESCALE_EXP));
            scale += DD_RESCALE_EXP;
        }
    }
    out
}

fn cd_from(step: &CdStep, rtol: f64) -> CdCheck {
    let diff = (step.lhs - step.rhs).hi.abs();
    let (lhs, rhs) = (step.lhs.hi, step.rhs.hi);
    let ok = diff <= rtol * lhs.abs().max(rhs.abs());
    CdCheck { lhs, rhs, ln_scale: 2.0 * step.scale as f64 * std::f64::consts::LN_2, ok }
}

fn cd0_from(step: &CdStep) -> bool {
    step.cd0.ln() + 2.0 * step.scale as f64 * std::f64::consts::LN_2 >= (1.0 - 1e-9f64).ln()
}

/// The identity at `n` with relative tolerance `1e-9`.
pub fn cd_check(spec: &CoefficientSpec, n: usize) -> Result<CdCheck> {
    if n == 0 {
        return Err(Error::Argument("n must be >= 1".into()));
    }
    let steps = cd_steps(&Coefs::load(spec, n)?, n);
    Ok(cd_from(&steps[n - 1], 1e-9))
}

/// `1 <= a_n |v_n| |v_{n+1}|` up to a slack of `1e-9`.
pub fn cd0_check(spec: &CoefficientSpec, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::Argument("n must be >= 1".into()));
    }
    let steps = cd_steps(&Coefs::load(spec, n)?, n);
    Ok(cd0_from(&steps[n - 1]))
}

/// Runs both checks for every `n <= n_max` on one recurrence pass, the
/// identity at relative tolerance `rtol`. Returns the first failing `n`.
pub fn cd_sweep(spec: &CoefficientSpec, n_max: usize, rtol: f64) -> Result<Option<usize>> {
    if n_max == 0 {
        return Err(Error::Argument("n_max must be >= 1".into()));
    }
    let steps = cd_steps(&Coefs::load(spec, n_max)?, n_max);
    Ok(steps.iter().position(|st| !cd_from(st, rtol).ok || !cd0_from(st)).map(|i| i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Growing,
    /// Relative growth below `1e-12` over the last decade of `n`.
    Saturated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumSquares {
    /// `ln |v_n|²` for `n = 1..=n_max`.
    pub ln_terms: Vec<f64>,
    /// `ln Σ_{k<=n} |v_k|²`, nondecreasing, starting at `0`.
    pub ln_partial_sums: Vec<f64>,
    pub trend: Trend,
}

impl SumSquares {
    /// The partial sums themselves, overflowing to `+inf` where needed.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.ln_partial_sums.iter().map(|l| l.exp()).collect()
    }

    /// CSV with columns `n, abs_v_n_sq, partial_sum`.
    pub fn csv(&self) -> Result<Vec<u8>> {
        crate::report::csv_bytes(
            &["n", "abs_v_n_sq", "partial_sum"],
            self.ln_terms
                .iter()
                .zip(&self.ln_partial_sums)
                .enumerate()
                .map(|(i, (t, s))| vec![(i + 1).to_string(), sci(t.exp()), sci(s.exp())]),
        )
    }
}

fn ln_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Partial sums of `|p_n(i)|²` with a saturation label.
pub fn sumsq_vi(spec: &CoefficientSpec, n_max: usize) -> Result<SumSquares> {
    if n_max == 0 {
        return Err(Error::Argument("n_max must be >= 1".into()));
    }
    let (_, v) = v_sequence(spec, n_max)?;
    let ln_terms: Vec<f64> = (1..=n_max).map(|k| 2.0 * v.ln_abs(k)).collect();
    let mut ln_partial_sums = Vec::with_capacity(n_max);
    let mut acc = f64::NEG_INFINITY;
    for t in &ln_terms {
        acc = ln_add(acc, *t).max(acc);
        ln_partial_sums.push(acc);
    }
    let from = ln_partial_sums[(n_max / 10).max(1) - 1];
    let trend = if n_max >= 10 && acc - from < 1e-12 { Trend::Saturated } else { Trend::Growing };
    Ok(SumSquares { ln_terms, ln_partial_sums, trend })
}

/// Eigenvalues of `T_N`, which are the zeros of `p_{N+1}`.
pub fn zeros_p(spec: &CoefficientSpec, n: usize, tol: f64) -> Result<Vec<f64>> {
    eigenvalues(&truncate(spec, n)?, tol)
}

/// Number of sign agreements between consecutive `p_k(x)`, `k = 1..=N+1`,
/// which equals the number of zeros of `p_{N+1}` below `x`. Evaluated on
/// the ratios `p_{k+1}/p_k` so that no value overflows; an exact zero takes
/// the sign that places the zero below `x`.
pub fn sign_agreements(t: &Truncation, x: f64) -> usize {
    let n = t.len();
    let mut count = 0;
    let mut r = 0.0;
    for k in 1..=n {
        let back = if k == 1 { 0.0 } else { t.a(k - 1) / r };
        r = ((x - t.b(k)) - back) / t.a(k);
        if r == 0.0 {
            r = f64::MIN_POSITIVE;
        }
        count += (r > 0.0) as usize;
    }
    count
}

/// Zeros of `p_{N+1}` located by bisection on [`sign_agreements`],
/// independently of the Sturm count used by the eigensolver.
pub fn zeros_by_sign_changes(spec: &CoefficientSpec, n: usize, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let t = truncate(spec, n)?;
    let bound = t.norm_inf() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    Ok((0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            loop {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= tol || mid <= lo || mid >= hi {
                    break mid;
                }
                if sign_agreements(&t, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffseq::{Branch, BranchRule, RecursionBase, RecursiveRule, SequenceRule};
    use crate::{presets, Exponent};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_polynomials() {
        let s = presets::free().unwrap();
        let p = eval_poly(&s, 3, c(0.7, 0.0)).unwrap();
        assert_eq!(p.value(1), c(1.0, 0.0));
        assert_abs_diff_eq!(p.value(2).re, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(p.value(3).re, 0.49 - 1.0, epsilon = 1e-15);
        let v = eval_poly(&s, 3, Complex64::i()).unwrap();
        assert_eq!(v.value(2), c(0.0, 1.0));
        assert_eq!(v.value(3), c(-2.0, 0.0));
    }

    #[test]
    fn christoffel_darboux_small_n() {
        let s = presets::free().unwrap();
        let r = cd_check(&s, 1).unwrap();
        assert!(r.ok && r.lhs == 1.0 && r.rhs == 1.0);
        let r = cd_check(&s, 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (2.0, 2.0));
        assert!(cd0_check(&s, 1).unwrap() && cd0_check(&s, 2).unwrap());
    }

    #[test]
    fn rescaling_keeps_identities_for_huge_growth() {
        let s = presets::ex_b1(Exponent::from_integer(3)).unwrap();
        let seq = eval_poly(&s, 400, c(2.0, 1.0)).unwrap();
        assert!(seq.scale_log() > 0.0);
        for k in [2, 100, 399] {
            assert!(recurrence_residual(&s, &seq, k).unwrap() < 1e-10);
        }
        assert_eq!(cd_sweep(&s, 300, 1e-9).unwrap(), None);
    }

    #[test]
    fn sums_grow_for_free_and_saturate_for_geometric_growth() {
        let free = sumsq_vi(&presets::free().unwrap(), 200).unwrap();
        assert_eq!(free.ln_partial_sums[0], 0.0);
        assert!(free.ln_partial_sums.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(free.trend, Trend::Growing);
        let doubling = RecursiveRule::new(
            2.0,
            vec![Branch::power(2.0, Exponent::from_integer(0)).unwrap()],
            RecursionBase::Previous,
        )
        .unwrap();
        let spec = CoefficientSpec::new(
            SequenceRule::Recursive(doubling),
            SequenceRule::Branches(BranchRule::single(Branch::zero())),
        )
        .unwrap();
        assert_eq!(sumsq_vi(&spec, 500).unwrap().trend, Trend::Saturated);
    }

    #[test]
    fn zeros_of_p3() {
        let z = zeros_p(&presets::free().unwrap(), 2, 1e-13).unwrap();
        assert_abs_diff_eq!(z[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z[1], 1.0, epsilon = 1e-12);
        let s = presets::ex_b1(Exponent::from_integer(1)).unwrap();
        let by_signs = zeros_by_sign_changes(&s, 3, 1e-13).unwrap();
        for (x, y) in zeros_p(&s, 3, 1e-13).unwrap().iter().zip(by_signs) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-10);
        }
        let one = zeros_by_sign_changes(&s, 1, 1e-13).unwrap();
        assert_abs_diff_eq!(one[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_rows() {
        let s = sumsq_vi(&presets::free().unwrap(), 3).unwrap();
        let text = String::from_utf8(s.csv().unwrap()).unwrap();
        assert_eq!(text.lines().next(), Some("n,abs_v_n_sq,partial_sum"));
        assert_eq!(text.lines().nth(1), Some("1,1e0,1e0"));
    }
}
