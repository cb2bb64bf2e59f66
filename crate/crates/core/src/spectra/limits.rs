use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{eigenvalues, eigenvector, truncate};
use crate::coeffseq::CoefficientSpec;
use crate::report::sci;
use crate::{Error, Result};

/// One eigenvalue of one truncation with its last-coordinate data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub index: usize,
    pub lambda: f64,
    pub delta_n: f64,
    /// `a_N |δ_N|`.
    pub a_n_delta_n: f64,
    /// `log10(a_N |δ_N|)`, finite where the product underflows.
    #[serde(with = "crate::report::extended")]
    pub log10_a_n_delta_n: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: f64,
    pub a_n_delta_n: f64,
    #[serde(with = "crate::report::extended")]
    pub log10_a_n_delta_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub location: f64,
    /// Truncation orders whose spectra contributed.
    pub support: Vec<usize>,
    pub spread: f64,
    /// `a_N |δ_N|` along the nearest-eigenvalue chain.
    pub gencond_track: Vec<TrackPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPointReport {
    pub window: (f64, f64),
    pub cluster_tol: f64,
    pub truncations: Vec<usize>,
    pub candidates: Vec<Candidate>,
    /// Raw per-truncation data inside the window, for re-clustering.
    pub rows: Vec<SpectrumRow>,
}

/// Eigenvalues of `T_N` inside `[lo, hi]` with `δ_N` and `a_N |δ_N|`.
pub fn spectrum_rows(spec: &CoefficientSpec, n: usize, window: (f64, f64), eig_tol: f64) -> Result<Vec<SpectrumRow>> {
    let t = truncate(spec, n)?;
    let ln_a = t.edge.ln();
    eigenvalues(&t, eig_tol)?
        .into_iter()
        .enumerate()
        .filter(|(_, l)| *l >= window.0 && *l <= window.1)
        .map(|(index, lambda)| {
            let p = eigenvector(&t, lambda)?;
            Ok(SpectrumRow {
                n,
                index: index + 1,
                lambda,
                delta_n: p.last_coord,
                a_n_delta_n: t.edge * p.last_coord.abs(),
                log10_a_n_delta_n: (ln_a + p.ln_abs_last) / std::f64::consts::LN_10,
            })
        })
        .collect()
}

/// Candidate limit points of the truncation spectra inside `window`.
///
/// Anchors are the eigenvalues of the largest truncation. An anchor is
/// kept when each of the last `⌈3L/4⌉` truncations (of `L`) has an
/// eigenvalue within `cluster_tol` of it and the chain of those nearest
/// eigenvalues spreads by at most `cluster_tol`.
pub fn limit_points(
    spec: &CoefficientSpec,
    n_list: &[usize],
    window: (f64, f64),
    cluster_tol: f64,
    eig_tol: f64,
) -> Result<LimitPointReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::Argument("truncation orders must be positive and strictly increasing".into()));
    }
    if !(window.0 < window.1) || !(cluster_tol > 0.0) {
        return Err(Error::Argument("window must be a nonempty interval and cluster_tol positive".into()));
    }
    let per_n: Vec<Vec<SpectrumRow>> =
        n_list.par_iter().map(|&n| spectrum_rows(spec, n, window, eig_tol)).collect::<Result<_>>()?;
    let tail_len = (3 * n_list.len()).div_ceil(4);
    let tail = &per_n[n_list.len() - tail_len..];
    let anchors = per_n.last().expect("nonempty list");
    let mut candidates = Vec::new();
    for anchor in anchors {
        let chain: Option<Vec<&SpectrumRow>> = tail
            .iter()
            .map(|rows| {
                rows.iter()
                    .min_by(|x, y| (x.lambda - anchor.lambda).abs().total_cmp(&(y.lambda - anchor.lambda).abs()))
                    .filter(|r| (r.lambda - anchor.lambda).abs() <= cluster_tol)
            })
            .collect();
        let Some(chain) = chain else { continue };
        let lo = chain.iter().map(|r| r.lambda).fold(f64::INFINITY, f64::min);
        let hi = chain.iter().map(|r| r.lambda).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > cluster_tol {
            continue;
        }
        candidates.push(Candidate {
            location: anchor.lambda,
            support: chain.iter().map(|r| r.n).collect(),
            spread: hi - lo,
            gencond_track: chain
                .iter()
                .map(|r| TrackPoint {
                    n: r.n,
                    lambda: r.lambda,
                    a_n_delta_n: r.a_n_delta_n,
                    log10_a_n_delta_n: r.log10_a_n_delta_n,
                })
                .collect(),
        });
    }
    Ok(LimitPointReport {
        window,
        cluster_tol,
        truncations: n_list.to_vec(),
        candidates,
        rows: per_n.into_iter().flatten().collect(),
    })
}

/// CSV with columns `N, index, lambda, delta_N, a_N_delta_N`.
pub fn spectrum_csv(rows: &[SpectrumRow]) -> Result<Vec<u8>> {
    crate::report::csv_bytes(
        &["N", "index", "lambda", "delta_N", "a_N_delta_N"],
        rows.iter()
            .map(|r| vec![r.n.to_string(), r.index.to_string(), sci(r.lambda), sci(r.delta_n), sci(r.a_n_delta_n)]),
    )
}

/// Comparison of the spectra of `T_N` and `T_{N+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interlacing {
    #[serde(rename = "N")]
    pub n: usize,
    /// Eigenvalues of `T_N` separated from both neighbours in the spectrum
    /// of `T_{N+1}` by more than the eigenvalue resolution.
    pub resolved: usize,
    /// Eigenvalues within resolution of a neighbour whose eigenvector has a
    /// nonzero last coordinate, which makes the separation strict.
    pub certified: usize,
    /// 1-based indices where the order is violated.
    pub violations: Vec<usize>,
}

impl Interlacing {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `λ_i(T_{N+1}) < λ_i(T_N) < λ_{i+1}(T_{N+1})` for every `i`.
///
/// When `δ_N` is tiny the two spectra agree to rounding and the gap cannot
/// be resolved in floating point. Those pairs count as strict when the
/// computed order is consistent within `eig_tol + 16 ε ‖T‖∞` and the
/// eigenvector of `T_N` has `δ_N ≠ 0`: the eigenvalues of `T_{N+1}` are the
/// roots of `λ - b_{N+1} - a_N² Σ_i δ_{N,i}² / (λ - λ_i(T_N))`, so every
/// pole with nonzero weight is strictly separated from the roots.
pub fn interlacing(spec: &CoefficientSpec, n: usize, eig_tol: f64) -> Result<Interlacing> {
    let small_t = truncate(spec, n)?;
    let big_t = truncate(spec, n + 1)?;
    let small = eigenvalues(&small_t, eig_tol)?;
    let big = eigenvalues(&big_t, eig_tol)?;
    let res = eig_tol + 16.0 * f64::EPSILON * big_t.norm_inf().max(1.0);
    let mut out = Interlacing { n, resolved: 0, certified: 0, violations: Vec::new() };
    for (i, &mu) in small.iter().enumerate() {
        let (below, above) = (mu - big[i], big[i + 1] - mu);
        if below > res && above > res {
            out.resolved += 1;
        } else if below < -res || above < -res {
            out.violations.push(i + 1);
        } else if eigenvector(&small_t, mu)?.ln_abs_last > f64::NEG_INFINITY {
            out.certified += 1;
        } else {
            out.violations.push(i + 1);
        }
    }
    Ok(out)
}

/// Whether [`interlacing`] finds no violation.
pub fn interlacing_check(spec: &CoefficientSpec, n: usize, eig_tol: f64) -> Result<bool> {
    Ok(interlacing(spec, n, eig_tol)?.holds())
}
