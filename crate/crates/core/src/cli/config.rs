//! The analysis configuration document.
//!
//! Every key is optional. A minimal document selects an operator either
//! inline or by preset:
//!
//! ```json
//! { "preset": "ex-B1", "params": { "alpha": "5/2" } }
//! ```
//!
//! ```json
//! {
//!   "operator": {
//!     "a": { "modulus": 1, "branches": [
//!       { "residue": 0, "constant": 1.0, "exponent_num": 2, "exponent_den": 1 } ] },
//!     "b": { "modulus": 1, "branches": [
//!       { "residue": 0, "constant": 1.0, "exponent_num": 3, "exponent_den": 1, "sign": 1 } ] }
//!   },
//!   "m_max": 6,
//!   "numeric_range": { "start": 10, "end": 2000, "stride": 10 },
//!   "truncations": [25, 50, 100],
//!   "window": [-50.0, 50.0],
//!   "tolerances": { "eig_tol": 1e-12, "cluster_tol": 1e-3, "cf_tail_tol": 1e-8 },
//!   "cfrac": { "re": [1.0, 3.0, 3], "im": [1.0, 3.0, 3], "n_max": 200 },
//!   "verify": { "seed": 7, "tolerance": 1.0, "truncations": 200, "specs": 20 },
//!   "outputs": { "dir": "out", "format": "both" }
//! }
//! ```
//!
//! Sequence documents take `modulus`, `branches` (each with `residue`,
//! `constant`, `exponent_num`, `exponent_den` and `sign` of `+1` or `-1`),
//! an optional `override` and an optional `recursive` block:
//!
//! * `{"kind": "list", "entries": [[7, 2.5], ..]}` sets the listed indices,
//! * `{"kind": "squares", "base": 0.5, "sign": 1}` sets perfect squares
//!   `n = k²` to `sign · base^n`,
//! * `{"kind": "residue", "modulus": 3, "residue": 1, "constant": ..,
//!   "exponent_num": .., "exponent_den": ..}` replaces one residue class,
//! * `{"seed": 1.0, "factors": [..], "relative_to": "self"}` defines
//!   `x_n = f_n x_{n-1}` with `x_1 = seed`; `"a_prev"` instead builds a `b`
//!   sequence as `b_n = f_n a_{n-1}`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffseq::{CoefficientSpec, SpecDocument};
use crate::conditions::NumericRange;
use crate::multiindex::MAX_DEPTH;
use crate::presets;
use crate::verify::VerifyConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eig_tol: f64,
    pub cluster_tol: f64,
    pub cf_tail_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eig_tol: 1e-12, cluster_tol: 1e-3, cf_tail_tol: 1e-8 }
    }
}

/// A rectangular grid `re × im`, each axis given as `[lo, hi, count]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfracGrid {
    pub re: (f64, f64, usize),
    pub im: (f64, f64, usize),
    pub n_max: usize,
}

impl Default for CfracGrid {
    fn default() -> Self {
        Self { re: (2.0, 2.0, 1), im: (3.0, 3.0, 1), n_max: 200 }
    }
}

fn axis((lo, hi, count): (f64, f64, usize)) -> Vec<f64> {
    match count {
        1 => vec![lo],
        c => (0..c).map(|i| lo + (hi - lo) * i as f64 / (c - 1) as f64).collect(),
    }
}

impl CfracGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let im = axis(self.im);
        axis(self.re).into_iter().flat_map(|x| im.iter().map(move |&y| Complex64::new(x, y))).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<SpecDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Preset parameters as rational strings such as `"17/4"`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    pub m_max: usize,
    pub numeric_range: NumericRange,
    pub truncations: Vec<usize>,
    /// `[lo, hi]` for eigenvalue reports and limit-point search.
    pub window: (f64, f64),
    pub tolerances: Tolerances,
    pub cfrac: CfracGrid,
    pub verify: VerifyConfig,
    pub outputs: Outputs,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            operator: None,
            preset: None,
            params: BTreeMap::new(),
            m_max: 6,
            numeric_range: NumericRange::default(),
            truncations: vec![25, 50, 100],
            window: (-50.0, 50.0),
            tolerances: Tolerances::default(),
            cfrac: CfracGrid::default(),
            verify: VerifyConfig::default(),
            outputs: Outputs::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let t = &self.tolerances;
        for (name, v) in [("eig_tol", t.eig_tol), ("cluster_tol", t.cluster_tol), ("cf_tail_tol", t.cf_tail_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.m_max == 0 || self.m_max > MAX_DEPTH {
            return bad(format!("m_max must lie in 1..={MAX_DEPTH}, got {}", self.m_max));
        }
        if self.truncations.is_empty() || self.truncations[0] == 0 || self.truncations.windows(2).any(|w| w[0] >= w[1])
        {
            return bad(format!("truncations must be positive and strictly increasing, got {:?}", self.truncations));
        }
        if !(self.window.0 < self.window.1) {
            return bad(format!("window must satisfy lo < hi, got {:?}", self.window));
        }
        if self.cfrac.n_max < 2 || self.cfrac.re.2 == 0 || self.cfrac.im.2 == 0 {
            return bad("cfrac grid needs n_max >= 2 and at least one point per axis".into());
        }
        if !(self.verify.tolerance >= 0.0) {
            return bad(format!("verify tolerance must be nonnegative, got {}", self.verify.tolerance));
        }
        if self.operator.is_some() && self.preset.is_some() {
            return bad("give either an inline operator or a preset, not both".into());
        }
        self.numeric_range.validate()
    }

    /// The operator this configuration selects.
    pub fn spec(&self) -> Result<CoefficientSpec> {
        match (&self.operator, &self.preset) {
            (Some(doc), None) => doc.to_spec(),
            (None, Some(name)) => {
                let params = self
                    .params
                    .iter()
                    .map(|(k, v)| {
                        Ok((k.clone(), presets::parse_rational(v).map_err(|e| Error::Config(e.to_string()))?))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                presets::build(name, &params)
            }
            (None, None) => Err(Error::Config("no operator: pass --config or --preset".into())),
            (Some(_), Some(_)) => Err(Error::Config("give either an inline operator or a preset, not both".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_doc_examples_parse() {
        let c = AnalysisConfig::from_json(r#"{ "preset": "ex-B1", "params": { "alpha": "5/2" } }"#).unwrap();
        c.validate().unwrap();
        assert!(c.spec().is_ok());
        let full = r#"{
          "operator": {
            "a": { "modulus": 1, "branches": [
              { "residue": 0, "constant": 1.0, "exponent_num": 2, "exponent_den": 1 } ] },
            "b": { "modulus": 1, "branches": [
              { "residue": 0, "constant": 1.0, "exponent_num": 3, "exponent_den": 1, "sign": 1 } ] }
          },
          "m_max": 6,
          "numeric_range": { "start": 10, "end": 2000, "stride": 10 },
          "truncations": [25, 50, 100],
          "window": [-50.0, 50.0],
          "tolerances": { "eig_tol": 1e-12, "cluster_tol": 1e-3, "cf_tail_tol": 1e-8 },
          "cfrac": { "re": [1.0, 3.0, 3], "im": [1.0, 3.0, 3], "n_max": 200 },
          "verify": { "seed": 7, "tolerance": 1.0, "truncations": 200, "specs": 20 },
          "outputs": { "dir": "out", "format": "both" }
        }"#;
        let c = AnalysisConfig::from_json(full).unwrap();
        c.validate().unwrap();
        assert_eq!(c.spec().unwrap(), presets::ex_b1(2.into()).unwrap());
        assert_eq!(c.cfrac.points().len(), 9);
    }

    #[test]
    fn validation_errors() {
        let bad = [
            r#"{"tolerances": {"eig_tol": 0}}"#,
            r#"{"m_max": 25}"#,
            r#"{"truncations": [4, 4]}"#,
            r#"{"window": [1, -1]}"#,
            r#"{"numeric_range": {"start": 0, "end": 5, "stride": 1}}"#,
        ];
        for text in bad {
            assert!(AnalysisConfig::from_json(text).unwrap().validate().is_err(), "{text}");
        }
        assert!(AnalysisConfig::from_json(r#"{"unknown": 1}"#).is_err());
        assert!(AnalysisConfig::default().spec().is_err());
    }
}
