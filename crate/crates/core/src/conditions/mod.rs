//! Ratio sums `G⁺_{m,n}`, `G_{m,n}`, `G̃_{m,n}` and the self-adjointness
//! criteria built on them.
//!
//! Each criterion is decided symbolically when the coefficients admit an
//! exact leading-order description along residue classes of `n`, and falls
//! back to a numeric diagnostic otherwise. Numeric verdicts are always
//! [`Outcome::Inconclusive`]: a finite sample cannot witness a limit.
//! [`Outcome::Fails`] means only that the hypothesis of the criterion is not
//! met.

mod asymptotic;
mod battery;
mod criteria;
mod evaluate;
mod numeric;

use serde::{Deserialize, Serialize};

use crate::coeffseq::CoefficientSpec;
use crate::Exponent;

pub use asymptotic::{Context, Order, ProductKind};
pub use battery::{run_battery, Battery, Conclusion, Tag, Witness};
pub use criteria::{
    check_bm, check_carleman, check_cm, check_cojuhari_janas, check_dennis_wall, check_dm, check_janas_naboko,
    check_limit_gm_zero, check_weak,
};
pub use evaluate::{
    g_full, g_full_times_a, g_plus, g_plus_times_a, g_tilde, ratio_factors, recursion_check_g_tilde, RatioFactors,
};
pub use numeric::{NumericRange, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "B_m")]
    Bm,
    #[serde(rename = "C_m")]
    Cm,
    #[serde(rename = "D_m")]
    Dm,
    /// `G_{m,n} → 0`.
    #[serde(rename = "G_LIM")]
    GLim,
    #[serde(rename = "CAR")]
    Carleman,
    #[serde(rename = "DW")]
    DennisWall,
    #[serde(rename = "JN")]
    JanasNaboko,
    #[serde(rename = "CJ")]
    CojuhariJanas,
    #[serde(rename = "WEAK")]
    Weak,
}

impl Criterion {
    pub fn id(self) -> &'static str {
        match self {
            Criterion::Bm => "B_m",
            Criterion::Cm => "C_m",
            Criterion::Dm => "D_m",
            Criterion::GLim => "G_LIM",
            Criterion::Carleman => "CAR",
            Criterion::DennisWall => "DW",
            Criterion::JanasNaboko => "JN",
            Criterion::CojuhariJanas => "CJ",
            Criterion::Weak => "WEAK",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Symbolic,
    Numeric,
}

/// Leading order of the criterion's quantity in one context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextOrder {
    pub context: String,
    pub class: u64,
    pub modulus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_offset: Option<i64>,
    pub order: Order,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub negative: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Exponent of the decisive context.
    #[serde(with = "crate::report::exponent_opt", default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Exponent>,
    #[serde(with = "crate::report::extended_opt", default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// Bound the quantity is compared against (`2^-m`, `1/2`).
    #[serde(with = "crate::report::extended_opt", default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_diverges: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contexts: Vec<ContextOrder>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<Sample>,
    #[serde(with = "crate::report::extended_opt", default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partial_sums: Vec<Sample>,
    /// Partial sums skipping `Δ_m = {n : dist(n, Δ) < m}`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restricted_partial_sums: Vec<Sample>,
    #[serde(with = "crate::report::extended_opt", default, skip_serializing_if = "Option::is_none")]
    pub tail_max: Option<f64>,
    /// Whether the bound held on every sampled index of the tail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_n_satisfied: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: Criterion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub outcome: Outcome,
    pub mode: Mode,
    pub evidence: Evidence,
}

/// `(constant, exponent)` terms of an expansion per residue class of `n`,
/// in decreasing exponent order with one entry per distinct exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSum {
    pub modulus: u64,
    pub classes: Vec<Vec<ExponentTerm>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTerm {
    pub constant: f64,
    #[serde(with = "crate::report::exponent_str")]
    pub exponent: Exponent,
}

impl ExponentSum {
    pub fn dominant(&self, class: u64) -> Option<ExponentTerm> {
        self.classes.get(class as usize)?.first().copied()
    }

    /// Largest dominant exponent over all classes.
    pub fn max_exponent(&self) -> Option<Exponent> {
        self.classes.iter().filter_map(|c| c.first().map(|t| t.exponent)).max()
    }
}

/// Expands `kind` at depth `m` into per-class power terms, or `None` when
/// the operator is not a pure power family on every class.
pub fn symbolic_exponent_of(kind: ProductKind, spec: &CoefficientSpec, m: usize) -> Option<ExponentSum> {
    if spec.has_sparse_override() {
        return None;
    }
    let an = asymptotic::Analyzer::new(spec)?;
    let window = kind.window(m);
    let mut classes = Vec::new();
    for ctx in an.contexts(window) {
        let table = an.table(ctx, window);
        let acc = asymptotic::expand(&table, kind, m)?;
        let terms = acc.power_terms()?;
        classes.push(terms.into_iter().map(|(constant, exponent)| ExponentTerm { constant, exponent }).collect());
    }
    Some(ExponentSum { modulus: an.modulus(), classes })
}
