//! Sampled diagnostics used when a criterion cannot be decided symbolically.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Indices `start, start + stride, … <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericRange {
    pub start: u64,
    pub end: u64,
    pub stride: u64,
}

impl Default for NumericRange {
    fn default() -> Self {
        Self { start: 10, end: 2000, stride: 10 }
    }
}

impl NumericRange {
    pub fn new(start: u64, end: u64, stride: u64) -> Result<Self> {
        let r = Self { start, end, stride };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start == 0 || self.stride == 0 || self.end < self.start {
            return Err(Error::Config(format!(
                "numeric range needs 1 <= start <= end and stride >= 1, got {:?}",
                self
            )));
        }
        Ok(())
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> {
        (self.start..=self.end).step_by(self.stride as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub n: u64,
    #[serde(with = "crate::report::extended")]
    pub value: f64,
}

/// Evaluates `f` on the strided range starting no earlier than `first`,
/// skipping indices where evaluation fails.
pub(crate) fn sample(range: &NumericRange, first: u64, f: impl Fn(u64) -> Result<f64>) -> Vec<Sample> {
    range.indices().filter(|n| *n >= first).filter_map(|n| f(n).ok().map(|value| Sample { n, value })).collect()
}

/// Least-squares slope of `ln value` against `ln n` over finite positive
/// samples.
pub(crate) fn loglog_slope(samples: &[Sample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.value.is_finite() && s.value > 0.0)
        .map(|s| ((s.n as f64).ln(), s.value.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Running sums of `term(n)` over every `n` in `[first, range.end]`,
/// reported at the strided indices. Indices rejected by `keep` contribute
/// nothing; failed evaluations stop the sum.
pub(crate) fn partial_sums(
    range: &NumericRange,
    first: u64,
    keep: impl Fn(u64) -> bool,
    term: impl Fn(u64) -> Result<f64>,
) -> Vec<Sample> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    let start = first.max(1);
    for n in start..=range.end {
        if keep(n) {
            match term(n) {
                Ok(t) => acc += t,
                Err(_) => break,
            }
        }
        if n >= range.start && (n - range.start).is_multiple_of(range.stride) {
            out.push(Sample { n, value: acc });
        }
    }
    out
}

/// Maximum over the last quarter of the samples.
pub(crate) fn tail_max(samples: &[Sample]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let from = samples.len() - samples.len().div_ceil(4);
    samples[from..].iter().map(|s| s.value).reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power() {
        let r = NumericRange::new(10, 1000, 10).unwrap();
        let s = sample(&r, 1, |n| Ok(3.0 * (n as f64).powf(-1.5)));
        assert!((loglog_slope(&s).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn partial_sums_cover_every_index() {
        let r = NumericRange::new(1, 10, 5).unwrap();
        let s = partial_sums(&r, 1, |_| true, |_| Ok(1.0));
        assert_eq!(s.iter().map(|x| (x.n, x.value)).collect::<Vec<_>>(), vec![(1, 1.0), (6, 6.0)]);
        let odd = partial_sums(&r, 1, |n| n % 2 == 1, |_| Ok(1.0));
        assert_eq!(odd[1].value, 3.0);
    }

    #[test]
    fn invalid_ranges() {
        assert!(NumericRange::new(0, 10, 1).is_err());
        assert!(NumericRange::new(5, 4, 1).is_err());
        assert!(NumericRange::new(1, 4, 0).is_err());
    }

    #[test]
    fn tail_maximum() {
        let s: Vec<Sample> = (1..=8).map(|n| Sample { n, value: 1.0 / n as f64 }).collect();
        assert_eq!(tail_max(&s), Some(1.0 / 7.0));
    }
}
