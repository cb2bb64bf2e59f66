//! Finite truncations `T_N`, their spectra and eigenvectors, the
//! last-coordinate identities and a heuristic estimator of the limit-point
//! set `Λ(T)` of the truncation spectra.

mod eigen;
mod identities;
mod limits;

use serde::{Deserialize, Serialize};

use crate::coeffseq::CoefficientSpec;
use crate::{Error, Result};

pub use eigen::{eigenvalue_count, eigenvalues, eigenvector};
pub use identities::{delta_expansion, embedded_residual_sq, f_bound, residual_split, ResidualSplit};
pub use limits::{
    interlacing, interlacing_check, limit_points, spectrum_csv, spectrum_rows, Candidate, Interlacing,
    LimitPointReport, SpectrumRow, TrackPoint,
};

/// The `N × N` principal submatrix together with the coupling `a_N` to the
/// first discarded basis vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// `b_1..b_N`.
    pub diag: Vec<f64>,
    /// `a_1..a_{N-1}`.
    pub offdiag: Vec<f64>,
    /// `a_N`.
    pub edge: f64,
}

impl Truncation {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>, edge: f64) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Argument(format!(
                "truncation needs N >= 1 diagonal entries and N-1 off-diagonal ones, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if offdiag.iter().chain([&edge]).any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Argument("off-diagonal entries must be finite and positive".into()));
        }
        if diag.iter().any(|b| !b.is_finite()) {
            return Err(Error::Argument("diagonal entries must be finite".into()));
        }
        Ok(Self { diag, offdiag, edge })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `a_k` for `1 <= k <= N`, with `a_0 = 0`.
    pub fn a(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            k if k == self.len() => self.edge,
            k => self.offdiag[k - 1],
        }
    }

    /// `b_k` for `1 <= k <= N`.
    pub fn b(&self, k: usize) -> f64 {
        self.diag[k - 1]
    }

    /// Infinity norm of `J_N`.
    pub fn norm_inf(&self) -> f64 {
        (1..=self.len())
            .map(|k| self.b(k).abs() + self.a(k - 1) + if k < self.len() { self.a(k) } else { 0.0 })
            .fold(0.0, f64::max)
    }

    /// `J_N x` for a vector of length `N`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// `diag = b_1..b_N`, `offdiag = a_1..a_{N-1}`, `edge = a_N`.
pub fn truncate(spec: &CoefficientSpec, n: usize) -> Result<Truncation> {
    if n == 0 {
        return Err(Error::Argument("truncation order must be >= 1".into()));
    }
    let diag = (1..=n as u64).map(|k| spec.eval_b(k)).collect::<Result<Vec<_>>>()?;
    let offdiag = (1..n as u64).map(|k| spec.eval_a(k)).collect::<Result<Vec<_>>>()?;
    Truncation::new(diag, offdiag, spec.eval_a(n as u64)?)
}

/// A normalized eigenvector `x_N = (δ_1, …, δ_N)` of `T_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    /// `δ_N`.
    pub last_coord: f64,
    /// `ln |δ_N|`, accurate even where `δ_N` underflows.
    #[serde(with = "crate::report::extended")]
    pub ln_abs_last: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{presets, Exponent};

    #[test]
    fn truncation_shapes() {
        let t = truncate(&presets::free().unwrap(), 3).unwrap();
        assert_eq!(t.diag, vec![0.0; 3]);
        assert_eq!(t.offdiag, vec![1.0; 2]);
        assert_eq!(t.edge, 1.0);
        let t = truncate(&presets::ex_b1(Exponent::from_integer(1)).unwrap(), 2).unwrap();
        assert_eq!((t.diag.clone(), t.offdiag.clone(), t.edge), (vec![1.0, 4.0], vec![1.0], 2.0));
        let t = truncate(&presets::ex_b1(Exponent::from_integer(1)).unwrap(), 1).unwrap();
        assert!(t.offdiag.is_empty());
        assert_eq!(t.edge, 1.0);
        assert!(truncate(&presets::free().unwrap(), 0).is_err());
    }

    #[test]
    fn invalid_truncations() {
        assert!(Truncation::new(vec![0.0, 0.0], vec![-1.0], 1.0).is_err());
        assert!(Truncation::new(vec![0.0], vec![1.0], 1.0).is_err());
        assert!(Truncation::new(vec![], vec![], 1.0).is_err());
    }
}
