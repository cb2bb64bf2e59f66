//! Runs every criterion and aggregates a conclusion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criteria::*;
use super::numeric::NumericRange;
use super::{Criterion, Outcome, Verdict};
use crate::coeffseq::CoefficientSpec;
use crate::multiindex::MAX_DEPTH;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    SelfAdjoint,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    /// The limit points of the truncation spectra are exactly the spectrum.
    LambdaEqualsSigma,
}

/// A criterion that established the conclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub criterion: Criterion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub conclusion: Conclusion,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<Tag>,
    pub witnesses: Vec<Witness>,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Copy)]
enum Job {
    Depth(Criterion, usize),
    Plain(Criterion),
}

/// Runs `B_m`, `C_m`, `D_m` and `G_{m,n} → 0` for `m = 1..=m_max`, then the
/// Carleman, Dennis–Wall, Janas–Naboko, Cojuhari–Janas and weak criteria.
/// Verdict order is fixed regardless of scheduling.
pub fn run_battery(spec: &CoefficientSpec, m_max: usize, range: &NumericRange) -> Result<Battery> {
    if m_max == 0 || m_max > MAX_DEPTH {
        return Err(Error::Argument(format!("m_max must lie in 1..={MAX_DEPTH}, got {m_max}")));
    }
    range.validate()?;
    let mut jobs = Vec::new();
    for c in [Criterion::Bm, Criterion::Cm, Criterion::Dm, Criterion::GLim] {
        jobs.extend((1..=m_max).map(|m| Job::Depth(c, m)));
    }
    for c in
        [Criterion::Carleman, Criterion::DennisWall, Criterion::JanasNaboko, Criterion::CojuhariJanas, Criterion::Weak]
    {
        jobs.push(Job::Plain(c));
    }
    let verdicts = jobs
        .into_par_iter()
        .map(|job| match job {
            Job::Depth(c, m) => match c {
                Criterion::Bm => check_bm(spec, m, range),
                Criterion::Cm => check_cm(spec, m, range),
                Criterion::Dm => check_dm(spec, m, range),
                _ => check_limit_gm_zero(spec, m, range),
            },
            Job::Plain(c) => Ok(match c {
                Criterion::Carleman => check_carleman(spec, range),
                Criterion::DennisWall => check_dennis_wall(spec, range),
                Criterion::JanasNaboko => check_janas_naboko(spec, range),
                Criterion::CojuhariJanas => check_cojuhari_janas(spec, range),
                _ => check_weak(spec, range),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(verdicts))
}

fn summarize(verdicts: Vec<Verdict>) -> Battery {
    let witnesses: Vec<Witness> = verdicts
        .iter()
        .filter(|v| v.outcome == Outcome::Holds)
        .map(|v| Witness { criterion: v.criterion, m: v.m })
        .collect();
    let conclusion = if witnesses.is_empty() { Conclusion::Undecided } else { Conclusion::SelfAdjoint };
    let tags = if witnesses.iter().any(|w| matches!(w.criterion, Criterion::Bm | Criterion::Weak)) {
        vec![Tag::LambdaEqualsSigma]
    } else {
        Vec::new()
    };
    Battery { conclusion, tags, witnesses, verdicts }
}
