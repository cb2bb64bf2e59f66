//! The Jacobi continued fraction
//! `K(λ) = 1/(λ - b_1 - a_1²/(λ - b_2 - a_2²/(λ - b_3 - …)))`,
//! its approximants and the truncated resolvent entries they equal.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffseq::CoefficientSpec;
use crate::report::sci;
use crate::spectra::{eigenvalues, truncate, Truncation};
use crate::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Projective {
    Finite(Complex64),
    Infinity,
}

impl Projective {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Projective::Finite(z) => Some(z),
            Projective::Infinity => None,
        }
    }

    fn recip(self) -> Projective {
        match self {
            Projective::Infinity => Projective::Finite(Complex64::new(0.0, 0.0)),
            Projective::Finite(z) if z == Complex64::new(0.0, 0.0) => Projective::Infinity,
            Projective::Finite(z) => Projective::Finite(z.inv()),
        }
    }
}

/// `re`/`im` pair with non-finite parts written as strings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRepr {
    #[serde(with = "crate::report::extended")]
    pub re: f64,
    #[serde(with = "crate::report::extended")]
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Projective> for ComplexRepr {
    fn from(p: Projective) -> Self {
        match p {
            Projective::Finite(z) => z.into(),
            Projective::Infinity => Self { re: f64::INFINITY, im: f64::INFINITY },
        }
    }
}

/// Backward evaluation of the `N`-th approximant on a truncation's
/// coefficients, with interior zeros propagated as infinity.
pub fn approximant_of(t: &Truncation, lambda: Complex64) -> Projective {
    let n = t.len();
    let mut tail = Projective::Finite(lambda - t.b(n));
    for k in (1..n).rev() {
        let a2 = t.a(k) * t.a(k);
        tail = match tail {
            Projective::Infinity => Projective::Finite(lambda - t.b(k)),
            Projective::Finite(z) if z == Complex64::new(0.0, 0.0) => Projective::Infinity,
            Projective::Finite(z) => Projective::Finite(lambda - t.b(k) - a2 / z),
        };
    }
    tail.recip()
}

pub fn approximant(spec: &CoefficientSpec, n: usize, lambda: Complex64) -> Result<Projective> {
    Ok(approximant_of(&truncate(spec, n)?, lambda))
}

/// `((λ - J_N)^{-1} e_1, e_1)` from one tridiagonal elimination. A pivot
/// below `1e-14` of the matrix scale is reported as a pole.
pub fn resolvent_11(t: &Truncation, lambda: Complex64) -> Projective {
    let n = t.len();
    let tiny = 1e-14 * (t.norm_inf() + lambda.norm()).max(f64::MIN_POSITIVE);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    w[0] = lambda - t.b(1);
    if w[0].norm() <= tiny {
        return Projective::Infinity;
    }
    g[0] = w[0].inv();
    for k in 1..n {
        let a = t.a(k);
        w[k] = lambda - t.b(k + 1) - a * a / w[k - 1];
        if w[k].norm() <= tiny {
            return Projective::Infinity;
        }
        g[k] = g[k - 1] * a / w[k];
    }
    let mut y = g[n - 1];
    for k in (0..n - 1).rev() {
        y = g[k] + y * t.a(k + 1) / w[k];
    }
    Projective::Finite(y)
}

/// `|x - y| / max(|x|, |y|)`, zero when both vanish, `None` at infinity.
pub fn relative_deviation(x: Projective, y: Projective) -> Option<f64> {
    let (x, y) = (x.finite()?, y.finite()?);
    let scale = x.norm().max(y.norm());
    Some(if scale == 0.0 { 0.0 } else { (x - y).norm() / scale })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfEvaluation {
    pub lambda: ComplexRepr,
    /// `K_N(λ)` for `N = 1..=N_max`.
    pub approximants: Vec<ComplexRepr>,
    /// Relative deviation of `K_N` from the resolvent entry of `T_N`;
    /// `None` where either side is a pole.
    pub resolvent_match: Vec<Option<f64>>,
    pub converged: bool,
    /// Largest `|K_N - K_{N-1}|` over the last quarter of `N`.
    #[serde(with = "crate::report::extended_opt", default, skip_serializing_if = "Option::is_none")]
    pub tail_deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_estimate: Option<ComplexRepr>,
    /// Fitted geometric ratio of successive deviations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Distance from `λ` to the nearest eigenvalue of `T_{N_max}`.
    pub pole_distance: f64,
    pub pole_suspect: bool,
}

/// Least-squares fit of `ln d_N = c + N ln ρ`, returning `ρ` when the RMS
/// residual is below `0.5`.
fn fit_rate(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let rms = (points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / k).sqrt();
    (rms < 0.5).then(|| slope.exp())
}

fn evaluate(t: &Truncation, spectrum: &[f64], lambda: Complex64, tail_tol: f64, pole_tol: f64) -> CfEvaluation {
    let n_max = t.len();
    let mut approx = Vec::with_capacity(n_max);
    let mut matches = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let sub = Truncation { diag: t.diag[..n].to_vec(), offdiag: t.offdiag[..n - 1].to_vec(), edge: t.a(n) };
        let k = approximant_of(&sub, lambda);
        matches.push(relative_deviation(k, resolvent_11(&sub, lambda)));
        approx.push(k);
    }
    let devs: Vec<Option<f64>> = approx.windows(2).map(|w| Some((w[1].finite()? - w[0].finite()?).norm())).collect();
    let tail_from = devs.len() - devs.len().div_ceil(4);
    let tail = &devs[tail_from..];
    let tail_deviation = tail.iter().try_fold(0.0f64, |m, d| d.map(|d| m.max(d)));
    let converged = tail_deviation.is_some_and(|d| d < tail_tol);
    let points: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.filter(|d| *d > 0.0).map(|d| ((tail_from + i + 2) as f64, d.ln())))
        .collect();
    let pole_distance = spectrum.iter().map(|mu| (lambda - mu).norm()).fold(f64::INFINITY, f64::min);
    CfEvaluation {
        lambda: lambda.into(),
        converged,
        tail_deviation,
        limit_estimate: converged.then(|| approx[n_max - 1].into()),
        rate: if converged { fit_rate(&points) } else { None },
        pole_distance,
        pole_suspect: pole_distance <= pole_tol * (1.0 + lambda.norm()),
        approximants: approx.into_iter().map(Into::into).collect(),
        resolvent_match: matches,
    }
}

/// Approximants up to `n_max` at each grid point. `λ` is flagged as a pole
/// suspect within `10³ · eig_tol · (1 + |λ|)` of an eigenvalue of
/// `T_{N_max}`.
pub fn convergence_scan(
    spec: &CoefficientSpec,
    grid: &[Complex64],
    n_max: usize,
    tail_tol: f64,
    eig_tol: f64,
) -> Result<Vec<CfEvaluation>> {
    if n_max < 2 {
        return Err(Error::Argument("convergence scan needs N_max >= 2".into()));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::Argument("tail tolerance must be positive".into()));
    }
    let t = truncate(spec, n_max)?;
    let spectrum = eigenvalues(&t, eig_tol)?;
    Ok(grid.par_iter().map(|&l| evaluate(&t, &spectrum, l, tail_tol, 1e3 * eig_tol)).collect())
}

/// CSV with columns `re_lambda, im_lambda, N, re_approx, im_approx,
/// deviation`, where `deviation = |K_N - K_{N-1}|`.
pub fn scan_csv(scan: &[CfEvaluation]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for e in scan {
        for (i, k) in e.approximants.iter().enumerate() {
            let dev = if i == 0 {
                f64::NAN
            } else {
                let p = e.approximants[i - 1];
                ((k.re - p.re).powi(2) + (k.im - p.im).powi(2)).sqrt()
            };
            rows.push(vec![sci(e.lambda.re), sci(e.lambda.im), (i + 1).to_string(), sci(k.re), sci(k.im), sci(dev)]);
        }
    }
    crate::report::csv_bytes(&["re_lambda", "im_lambda", "N", "re_approx", "im_approx", "deviation"], rows)
}
