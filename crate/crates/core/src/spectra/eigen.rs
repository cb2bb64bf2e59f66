use rayon::prelude::*;

use super::{EigenPair, Truncation};
use crate::{Error, Result};

/// Smallest pivot magnitude admitted in the `LDLᵀ` recurrences.
fn pivmin(t: &Truncation) -> f64 {
    let amax = t.offdiag.iter().fold(1.0f64, |m, a| m.max(*a));
    f64::MIN_POSITIVE * amax * amax.max(1.0)
}

fn guard(q: f64, pmin: f64) -> f64 {
    if q.abs() < pmin {
        -pmin
    } else {
        q
    }
}

/// Number of eigenvalues of `J_N` strictly below `x`: the count of negative
/// pivots of `J_N - x = LDLᵀ`, which equals the sign-change count of the
/// leading principal minors.
pub fn eigenvalue_count(t: &Truncation, x: f64) -> usize {
    let pmin = pivmin(t);
    let mut q = guard(t.diag[0] - x, pmin);
    let mut count = (q < 0.0) as usize;
    for k in 1..t.len() {
        let a = t.offdiag[k - 1];
        q = guard(t.diag[k] - x - a * (a / q), pmin);
        count += (q < 0.0) as usize;
    }
    count
}

fn gershgorin(t: &Truncation) -> (f64, f64) {
    let n = t.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 1..=n {
        let r = t.a(k - 1) + if k < n { t.a(k) } else { 0.0 };
        lo = lo.min(t.b(k) - r);
        hi = hi.max(t.b(k) + r);
    }
    let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0) * 4.0;
    (lo - pad, hi + pad)
}

fn bisect(t: &Truncation, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        if eigenvalue_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// All eigenvalues in increasing order, each bracketed to width `tol` or to
/// adjacent floating-point numbers, whichever is wider.
pub fn eigenvalues(t: &Truncation, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("eigenvalue tolerance must be positive, got {tol}")));
    }
    let (lo, hi) = gershgorin(t);
    let n = t.len();
    let one = |k: usize| bisect(t, k, lo, hi, tol);
    Ok(if n >= 64 { (0..n).into_par_iter().map(one).collect() } else { (0..n).map(one).collect() })
}

/// Normalized eigenvector at an eigenvalue `lambda`, with the sign fixed by
/// `δ_1 > 0` (the sign of `p_1 = 1`).
///
/// The components are proportional to `p_k(λ)`. They are built from a
/// twisted factorization: forward pivots `D⁺` above the index where the
/// twist element is smallest and backward pivots `D⁻` below it, each
/// component carried as a sign and a logarithm, so that neither the decay
/// of localized vectors nor huge coefficients lose precision.
pub fn eigenvector(t: &Truncation, lambda: f64) -> Result<EigenPair> {
    let n = t.len();
    let pmin = pivmin(t);
    let s = |k: usize| t.b(k) - lambda;
    let mut dp = vec![0.0; n + 1];
    let mut dm = vec![0.0; n + 2];
    dp[1] = guard(s(1), pmin);
    for k in 2..=n {
        let a = t.a(k - 1);
        dp[k] = guard(s(k) - a * (a / dp[k - 1]), pmin);
    }
    dm[n] = guard(s(n), pmin);
    for k in (1..n).rev() {
        let a = t.a(k);
        dm[k] = guard(s(k) - a * (a / dm[k + 1]), pmin);
    }
    let twist = (1..=n)
        .min_by(|&i, &j| {
            let g = |k: usize| (dp[k] + dm[k] - s(k)).abs();
            g(i).total_cmp(&g(j))
        })
        .expect("nonempty truncation");

    let mut ln = vec![0.0; n + 1];
    let mut neg = vec![false; n + 1];
    for k in (1..twist).rev() {
        let r = -t.a(k) / dp[k];
        ln[k] = ln[k + 1] + r.abs().ln();
        neg[k] = neg[k + 1] ^ (r < 0.0);
    }
    for k in twist + 1..=n {
        let r = -t.a(k - 1) / dm[k];
        ln[k] = ln[k - 1] + r.abs().ln();
        neg[k] = neg[k - 1] ^ (r < 0.0);
    }
    let peak = ln[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_norm = peak + 0.5 * ln[1..].iter().map(|l| (2.0 * (l - peak)).exp()).sum::<f64>().ln();
    let flip = neg[1];
    let vector: Vec<f64> = (1..=n)
        .map(|k| {
            let v = (ln[k] - ln_norm).exp();
            if neg[k] ^ flip {
                -v
            } else {
                v
            }
        })
        .collect();

    let jx = t.apply(&vector);
    let residual = jx.iter().zip(&vector).map(|(y, x)| (y - lambda * x).powi(2)).sum::<f64>().sqrt();
    let tolerance = 1e-9 * (1.0 + lambda.abs()) + 64.0 * f64::EPSILON * t.norm_inf();
    if !(residual <= tolerance) {
        return Err(Error::Residual { residual, tolerance });
    }
    Ok(EigenPair { lambda, last_coord: vector[n - 1], vector, ln_abs_last: ln[n] - ln_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::spectra::truncate;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn free(n: usize) -> Truncation {
        truncate(&presets::free().unwrap(), n).unwrap()
    }

    #[test]
    fn free_matrix_eigenvalues() {
        let ev = eigenvalues(&free(4), 1e-13).unwrap();
        for (k, l) in ev.iter().enumerate() {
            assert_abs_diff_eq!(*l, -2.0 * ((k + 1) as f64 * PI / 5.0).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn small_cases() {
        let t = Truncation::new(vec![7.0], vec![], 1.0).unwrap();
        assert_abs_diff_eq!(eigenvalues(&t, 1e-13).unwrap()[0], 7.0, epsilon = 1e-12);
        let t = Truncation::new(vec![0.0, 0.0], vec![3.0], 1.0).unwrap();
        let ev = eigenvalues(&t, 1e-13).unwrap();
        assert_abs_diff_eq!(ev[0], -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 3.0, epsilon = 1e-12);
        assert!(eigenvalues(&t, 0.0).is_err());
    }

    #[test]
    fn eigenvectors_of_small_free_matrices() {
        let p = eigenvector(&free(2), 1.0).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(p.vector[0], h, epsilon = 1e-14);
        assert_abs_diff_eq!(p.vector[1], h, epsilon = 1e-14);
        let p = eigenvector(&free(3), 0.0).unwrap();
        assert_abs_diff_eq!(p.vector[0], h, epsilon = 1e-14);
        assert_abs_diff_eq!(p.vector[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.vector[2], -h, epsilon = 1e-14);
        let t = Truncation::new(vec![5.0], vec![], 2.0).unwrap();
        assert_eq!(eigenvector(&t, 5.0).unwrap().vector, vec![1.0]);
    }

    #[test]
    fn non_eigenvalue_is_rejected() {
        assert!(matches!(eigenvector(&free(3), 0.3), Err(Error::Residual { .. })));
    }

    #[test]
    fn localized_vectors_keep_their_tail() {
        let spec = presets::ex_b1(crate::Exponent::from_integer(2)).unwrap();
        let t = truncate(&spec, 200).unwrap();
        let l = eigenvalues(&t, 1e-12).unwrap()[0];
        let p = eigenvector(&t, l).unwrap();
        assert!(p.ln_abs_last < -300.0);
        assert!(p.ln_abs_last.is_finite());
    }

    #[test]
    fn counts_match_sorted_values() {
        let t = free(9);
        let ev = eigenvalues(&t, 1e-13).unwrap();
        for (k, l) in ev.iter().enumerate() {
            assert_eq!(eigenvalue_count(&t, l - 1e-9), k);
            assert_eq!(eigenvalue_count(&t, l + 1e-9), k + 1);
        }
    }
}
