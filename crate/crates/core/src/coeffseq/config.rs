//! Serde document model for coefficient specs.

use serde::{Deserialize, Serialize};

use super::{
    exponent, Branch, BranchRule, CoefficientSpec, Override, RecursionBase, RecursiveRule, SequenceRule, Sign,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub a: SequenceDocument,
    pub b: SequenceDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDocument {
    #[serde(default = "one_u32")]
    pub modulus: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchDocument>,
    #[serde(default, rename = "override", skip_serializing_if = "Option::is_none")]
    pub override_rule: Option<OverrideDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursive: Option<RecursiveDocument>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDocument {
    pub residue: u32,
    pub constant: f64,
    pub exponent_num: i64,
    #[serde(default = "one_i64")]
    pub exponent_den: i64,
    #[serde(default = "one_i8")]
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OverrideDocument {
    /// Explicit `[index, value]` pairs.
    List { entries: Vec<(u64, f64)> },
    /// `sign · base^n` on perfect squares.
    Squares {
        base: f64,
        #[serde(default = "one_i8")]
        sign: i8,
    },
    /// Replaces the power law on `n ≡ residue (mod modulus)`.
    Residue {
        modulus: u32,
        residue: u32,
        constant: f64,
        exponent_num: i64,
        #[serde(default = "one_i64")]
        exponent_den: i64,
        #[serde(default = "one_i8")]
        sign: i8,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativeTo {
    #[default]
    #[serde(rename = "self")]
    SelfPrevious,
    APrev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursiveDocument {
    pub seed: f64,
    pub factors: Vec<BranchDocument>,
    #[serde(default)]
    pub relative_to: RelativeTo,
}

fn one_u32() -> u32 {
    1
}
fn one_i64() -> i64 {
    1
}
fn one_i8() -> i8 {
    1
}

impl BranchDocument {
    fn to_branch(self) -> Result<Branch> {
        let sign = Sign::from_i8(self.sign)?;
        let e = exponent(self.exponent_num, self.exponent_den)?;
        if sign == Sign::Zero {
            return Ok(Branch::zero());
        }
        Branch::signed(self.constant, e, sign)
    }

    fn from_branch(residue: u32, br: &Branch) -> Self {
        Self {
            residue,
            constant: br.term.constant(),
            exponent_num: *br.term.exponent().numer(),
            exponent_den: *br.term.exponent().denom(),
            sign: br.sign.as_i8(),
        }
    }
}

/// Orders branch documents by residue, requiring each of `0..modulus` once.
fn branches_by_residue(modulus: u32, docs: &[BranchDocument]) -> Result<Vec<Branch>> {
    if modulus == 0 {
        return Err(Error::Config("modulus must be positive".into()));
    }
    let mut slots: Vec<Option<Branch>> = vec![None; modulus as usize];
    for d in docs {
        let slot = slots
            .get_mut(d.residue as usize)
            .ok_or_else(|| Error::Config(format!("residue {} out of range for modulus {modulus}", d.residue)))?;
        if slot.is_some() {
            return Err(Error::Config(format!("residue {} given twice", d.residue)));
        }
        *slot = Some(d.to_branch()?);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(r, s)| s.ok_or_else(|| Error::Config(format!("no branch for residue {r}"))))
        .collect()
}

impl SequenceDocument {
    fn to_rule(&self) -> Result<SequenceRule> {
        if let Some(rec) = &self.recursive {
            if !self.branches.is_empty() || self.override_rule.is_some() {
                return Err(Error::Config("a recursive sequence cannot also carry branches or an override".into()));
            }
            let factors = branches_by_residue(self.modulus, &rec.factors)?;
            let base = match rec.relative_to {
                RelativeTo::SelfPrevious => RecursionBase::Previous,
                RelativeTo::APrev => RecursionBase::PreviousA,
            };
            return Ok(SequenceRule::Recursive(RecursiveRule::new(rec.seed, factors, base)?));
        }
        let mut rule = BranchRule::periodic(branches_by_residue(self.modulus, &self.branches)?)?;
        match &self.override_rule {
            None => {}
            Some(OverrideDocument::List { entries }) => {
                rule = rule.with_override(Override::List(entries.clone()))?;
            }
            Some(OverrideDocument::Squares { base, sign }) => {
                rule = rule.with_override(Override::Squares { base: *base, sign: Sign::from_i8(*sign)? })?;
            }
            Some(OverrideDocument::Residue { modulus, residue, constant, exponent_num, exponent_den, sign }) => {
                let br = BranchDocument {
                    residue: *residue,
                    constant: *constant,
                    exponent_num: *exponent_num,
                    exponent_den: *exponent_den,
                    sign: *sign,
                }
                .to_branch()?;
                rule = rule.with_residue_override(*modulus, *residue, br)?;
            }
        }
        Ok(SequenceRule::Branches(rule))
    }

    fn from_rule(rule: &SequenceRule) -> Self {
        match rule {
            SequenceRule::Branches(r) => Self {
                modulus: r.modulus(),
                branches: r
                    .branches()
                    .iter()
                    .enumerate()
                    .map(|(i, b)| BranchDocument::from_branch(i as u32, b))
                    .collect(),
                override_rule: r.overrides().map(|o| match o {
                    Override::List(entries) => OverrideDocument::List { entries: entries.clone() },
                    Override::Squares { base, sign } => OverrideDocument::Squares { base: *base, sign: sign.as_i8() },
                }),
                recursive: None,
            },
            SequenceRule::Recursive(r) => Self {
                modulus: r.modulus(),
                branches: Vec::new(),
                override_rule: None,
                recursive: Some(RecursiveDocument {
                    seed: r.seed(),
                    factors: r
                        .factors()
                        .iter()
                        .enumerate()
                        .map(|(i, b)| BranchDocument::from_branch(i as u32, b))
                        .collect(),
                    relative_to: match r.base() {
                        RecursionBase::Previous => RelativeTo::SelfPrevious,
                        RecursionBase::PreviousA => RelativeTo::APrev,
                    },
                }),
            },
        }
    }
}

impl SpecDocument {
    pub fn to_spec(&self) -> Result<CoefficientSpec> {
        CoefficientSpec::new(self.a.to_rule()?, self.b.to_rule()?)
    }

    pub fn from_spec(spec: &CoefficientSpec) -> Self {
        Self {
            a: SequenceDocument::from_rule(spec.rule(super::Which::A)),
            b: SequenceDocument::from_rule(spec.rule(super::Which::B)),
        }
    }
}

impl CoefficientSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        doc.to_spec()
    }

    pub fn to_document(&self) -> SpecDocument {
        SpecDocument::from_spec(self)
    }
}
