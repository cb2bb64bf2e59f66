//! The individual self-adjointness criteria.

use std::cmp::Ordering;

use num_traits::Zero;

use super::asymptotic::{
    expand, is_near_square, Accumulator, Analyzer, Context, ContextTable, Mono, Order, ProductKind, Signed, TIE_RTOL,
};
use super::evaluate::{g_full, g_full_times_a, g_plus_times_a, g_tilde};
use super::numeric::{loglog_slope, partial_sums, sample, tail_max, NumericRange};
use super::{ContextOrder, Criterion, Evidence, Mode, Outcome, Verdict};
use crate::coeffseq::{CoefficientSpec, Override, SequenceRule, Which};
use crate::multiindex::MAX_DEPTH;
use crate::{Error, Exponent, Result};

fn check_depth(m: usize) -> Result<()> {
    if m == 0 || m > MAX_DEPTH {
        return Err(Error::Argument(format!("criterion depth must lie in 1..={MAX_DEPTH}, got {m}")));
    }
    Ok(())
}

/// Total order on leading behaviours, smallest first.
fn order_cmp(x: &Order, y: &Order) -> Ordering {
    fn rank(o: &Order) -> u8 {
        match o {
            Order::Zero => 0,
            Order::SuperDecay => 1,
            Order::Power { .. } => 2,
            Order::SuperGrowth => 3,
            Order::Infinite => 4,
        }
    }
    match (x, y) {
        (Order::Power { constant: c1, exponent: e1 }, Order::Power { constant: c2, exponent: e2 }) => {
            e1.cmp(e2).then(c1.total_cmp(c2))
        }
        _ => rank(x).cmp(&rank(y)),
    }
}

struct Row {
    ctx: Context,
    value: Option<Signed>,
    b_diverges: Option<bool>,
}

/// Runs `f` on every context, or `None` when the operator is outside the
/// symbolic engine's scope.
fn per_context(
    spec: &CoefficientSpec,
    window: i64,
    f: impl Fn(&Analyzer, &ContextTable) -> Option<Signed>,
) -> Option<Vec<Row>> {
    let an = Analyzer::new(spec)?;
    let rows = an
        .contexts(window)
        .into_iter()
        .map(|ctx| {
            let table = an.table(ctx, window);
            let value = f(&an, &table);
            let b_diverges = table.b(0).and_then(|b| an.classify(b.abs())).map(|s| s.order.diverges());
            Row { ctx, value, b_diverges }
        })
        .collect();
    Some(rows)
}

fn summaries(rows: &[Row]) -> Vec<ContextOrder> {
    rows.iter()
        .filter_map(|r| {
            let v = r.value?;
            Some(ContextOrder {
                context: r.ctx.label(),
                class: r.ctx.class,
                modulus: r.ctx.modulus,
                hit_offset: r.ctx.hit,
                order: v.order,
                negative: v.negative,
            })
        })
        .collect()
}

fn decisive_evidence(rows: &[Row], pick: Option<&Row>) -> Evidence {
    let order = pick.and_then(|r| r.value).map(|v| v.order);
    Evidence {
        exponent: order.and_then(|o| o.exponent()),
        constant: order.and_then(|o| o.constant()),
        contexts: summaries(rows),
        ..Evidence::default()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Bound {
    /// The quantity must tend to zero.
    Vanish,
    /// `lim sup` of the quantity must be below the value.
    Below(f64),
}

enum Judge {
    Ok,
    Violated,
    Tie,
}

fn judge(order: &Order, bound: Bound) -> Judge {
    if order.vanishes() {
        return Judge::Ok;
    }
    match (order, bound) {
        (Order::Power { constant, exponent }, Bound::Below(t)) if exponent.is_zero() => {
            if *constant < t * (1.0 - TIE_RTOL) {
                Judge::Ok
            } else if *constant > t * (1.0 + TIE_RTOL) {
                Judge::Violated
            } else {
                Judge::Tie
            }
        }
        _ => Judge::Violated,
    }
}

/// Combines per-context limits: one violating subsequence falsifies the
/// hypothesis; otherwise every context must be resolved.
fn decide_limit(rows: &[Row], bound: Bound, need_b_divergent: bool) -> Option<(Outcome, Evidence)> {
    let violated = |r: &Row| {
        (need_b_divergent && r.b_diverges == Some(false))
            || r.value.is_some_and(|v| matches!(judge(&v.order, bound), Judge::Violated))
    };
    let b_flag = need_b_divergent.then(|| rows.iter().all(|r| r.b_diverges == Some(true)));
    let with_b = |mut e: Evidence| {
        e.b_diverges = b_flag;
        if let Bound::Below(t) = bound {
            e.threshold = Some(t);
        }
        e
    };
    if let Some(bad) = rows.iter().filter(|r| violated(r)).max_by(|x, y| {
        let ox = x.value.map(|v| v.order).unwrap_or(Order::Zero);
        let oy = y.value.map(|v| v.order).unwrap_or(Order::Zero);
        order_cmp(&ox, &oy)
    }) {
        return Some((Outcome::Fails, with_b(decisive_evidence(rows, Some(bad)))));
    }
    if rows.iter().any(|r| r.value.is_none() || (need_b_divergent && r.b_diverges.is_none())) {
        return None;
    }
    let top = rows.iter().max_by(|x, y| order_cmp(&x.value.unwrap().order, &y.value.unwrap().order));
    let tie = rows.iter().any(|r| matches!(judge(&r.value.unwrap().order, bound), Judge::Tie));
    let outcome = if tie { Outcome::Inconclusive } else { Outcome::Holds };
    let mut ev = with_b(decisive_evidence(rows, top));
    if tie {
        ev.notes.push("leading constant equals the bound exactly".into());
    }
    Some((outcome, ev))
}

/// Whether `Σ term` diverges along the context: a residue class (density
/// `1/L`) diverges for exponents `>= -1`, a sparse square subsequence
/// `n = s² - d` for exponents `>= -1/2`.
fn series_diverges(ctx: &Context, term: &Order) -> bool {
    match term {
        Order::Power { exponent, .. } => {
            let cut = if ctx.hit.is_some() { Exponent::new(-1, 2) } else { Exponent::from_integer(-1) };
            *exponent >= cut
        }
        Order::SuperGrowth | Order::Infinite => true,
        Order::Zero | Order::SuperDecay => false,
    }
}

fn decide_series(rows: &[Row]) -> Option<(Outcome, Evidence)> {
    if let Some(div) = rows.iter().find(|r| r.value.is_some_and(|v| series_diverges(&r.ctx, &v.order))) {
        return Some((Outcome::Holds, decisive_evidence(rows, Some(div))));
    }
    if rows.iter().any(|r| r.value.is_none()) {
        return None;
    }
    let top = rows.iter().max_by(|x, y| order_cmp(&x.value.unwrap().order, &y.value.unwrap().order));
    Some((Outcome::Fails, decisive_evidence(rows, top)))
}

fn verdict(criterion: Criterion, m: Option<usize>, outcome: Outcome, mode: Mode, evidence: Evidence) -> Verdict {
    Verdict { criterion, m, outcome, mode, evidence }
}

fn symbolic(criterion: Criterion, m: Option<usize>, decided: Option<(Outcome, Evidence)>) -> Option<Verdict> {
    decided.map(|(o, e)| verdict(criterion, m, o, Mode::Symbolic, e))
}

fn numeric_limit(
    criterion: Criterion,
    m: Option<usize>,
    range: &NumericRange,
    first: u64,
    bound: Option<f64>,
    f: impl Fn(u64) -> Result<f64>,
) -> Verdict {
    let samples = sample(range, first, f);
    let mut ev = Evidence { slope: loglog_slope(&samples), tail_max: tail_max(&samples), ..Evidence::default() };
    if let Some(t) = bound {
        ev.threshold = Some(t);
        let from = samples.len() - samples.len().div_ceil(4);
        ev.finite_n_satisfied = (!samples.is_empty()).then(|| samples[from..].iter().all(|s| s.value < t));
    }
    ev.notes.push("symbolic analysis unavailable; sampled diagnostics only".into());
    ev.samples = samples;
    verdict(criterion, m, Outcome::Inconclusive, Mode::Numeric, ev)
}

/// `dist(n, Δ) < radius`, for `Δ` the index set of a sparse override.
fn near_override(spec: &CoefficientSpec, n: u64, radius: u64) -> bool {
    [Which::A, Which::B].iter().any(|w| match spec.rule(*w) {
        SequenceRule::Branches(r) => match r.overrides() {
            Some(Override::Squares { .. }) => is_near_square(n, radius),
            Some(Override::List(entries)) => {
                let lo = n.saturating_sub(radius.saturating_sub(1));
                let pos = entries.partition_point(|(i, _)| *i < lo);
                entries.get(pos).is_some_and(|(i, _)| i.abs_diff(n) < radius)
            }
            None => false,
        },
        SequenceRule::Recursive(_) => false,
    })
}

fn series_evidence(
    ev: &mut Evidence,
    spec: &CoefficientSpec,
    range: &NumericRange,
    first: u64,
    exclude_radius: Option<u64>,
    term: impl Fn(u64) -> Result<f64>,
) {
    ev.partial_sums = partial_sums(range, first, |_| true, &term);
    if let Some(radius) = exclude_radius.filter(|_| spec.has_sparse_override()) {
        ev.restricted_partial_sums = partial_sums(range, first, |n| !near_override(spec, n, radius), &term);
        ev.notes.push(format!("restricted sums skip indices within distance {} of the override set", radius - 1));
    }
}

fn numeric_series(
    criterion: Criterion,
    m: Option<usize>,
    spec: &CoefficientSpec,
    range: &NumericRange,
    first: u64,
    exclude_radius: Option<u64>,
    term: impl Fn(u64) -> Result<f64>,
) -> Verdict {
    let samples = sample(range, first, &term);
    let mut ev = Evidence { slope: loglog_slope(&samples), samples, ..Evidence::default() };
    series_evidence(&mut ev, spec, range, first, exclude_radius, &term);
    ev.notes.push("symbolic analysis unavailable; sampled diagnostics only".into());
    verdict(criterion, m, Outcome::Inconclusive, Mode::Numeric, ev)
}

fn expanded(an: &Analyzer, t: &ContextTable, kind: ProductKind, m: usize) -> Option<Signed> {
    an.dominant(&expand(t, kind, m)?)
}

fn inverted(s: Signed) -> Signed {
    Signed { negative: s.negative, order: s.order.inv() }
}

/// `𝔅_m` test: `|b_n| → ∞` and `a_n G⁺_{m,n} → 0`.
pub fn check_bm(spec: &CoefficientSpec, m: usize, range: &NumericRange) -> Result<Verdict> {
    check_depth(m)?;
    let kind = ProductKind::GPlusTimesA;
    let rows = per_context(spec, kind.window(m), |an, t| expanded(an, t, kind, m));
    if let Some(v) = symbolic(Criterion::Bm, Some(m), rows.and_then(|r| decide_limit(&r, Bound::Vanish, true))) {
        return Ok(v);
    }
    Ok(numeric_limit(Criterion::Bm, Some(m), range, m as u64 + 1, None, |n| g_plus_times_a(spec, m, n)))
}

/// Carleman-type `ℭ_m`: `Σ_n 1/(a_n G_{m,n}) = ∞`, with `1/(a_n G) = 0`
/// wherever `G = ∞`.
pub fn check_cm(spec: &CoefficientSpec, m: usize, range: &NumericRange) -> Result<Verdict> {
    check_depth(m)?;
    let kind = ProductKind::GFullTimesA;
    let term = |n: u64| -> Result<f64> {
        let g = g_full_times_a(spec, m, n)?;
        Ok(if g.is_infinite() { 0.0 } else { 1.0 / g })
    };
    let rows = per_context(spec, kind.window(m), |an, t| expanded(an, t, kind, m).map(inverted));
    let first = m as u64 + 1;
    match symbolic(Criterion::Cm, Some(m), rows.and_then(|r| decide_series(&r))) {
        Some(mut v) => {
            if spec.has_sparse_override() {
                series_evidence(&mut v.evidence, spec, range, first, Some(m as u64), term);
            }
            Ok(v)
        }
        None => Ok(numeric_series(Criterion::Cm, Some(m), spec, range, first, Some(m as u64), term)),
    }
}

/// `𝔇_m`: `lim sup G̃_{m,n} < 2^{-m}`.
pub fn check_dm(spec: &CoefficientSpec, m: usize, range: &NumericRange) -> Result<Verdict> {
    check_depth(m)?;
    let kind = ProductKind::GTilde;
    let bound = 0.5f64.powi(m as i32);
    let rows = per_context(spec, kind.window(m), |an, t| expanded(an, t, kind, m));
    if let Some(v) = symbolic(Criterion::Dm, Some(m), rows.and_then(|r| decide_limit(&r, Bound::Below(bound), false))) {
        return Ok(v);
    }
    Ok(numeric_limit(Criterion::Dm, Some(m), range, 1, Some(bound), |n| g_tilde(spec, m, n)))
}

/// `G_{m,n} → 0`.
pub fn check_limit_gm_zero(spec: &CoefficientSpec, m: usize, range: &NumericRange) -> Result<Verdict> {
    check_depth(m)?;
    let kind = ProductKind::GFull;
    let rows = per_context(spec, kind.window(m), |an, t| expanded(an, t, kind, m));
    if let Some(v) = symbolic(Criterion::GLim, Some(m), rows.and_then(|r| decide_limit(&r, Bound::Vanish, false))) {
        return Ok(v);
    }
    Ok(numeric_limit(Criterion::GLim, Some(m), range, m as u64 + 1, None, |n| g_full(spec, m, n)))
}

/// Carleman: `Σ 1/a_n = ∞`.
pub fn check_carleman(spec: &CoefficientSpec, range: &NumericRange) -> Verdict {
    let rows = per_context(spec, 2, |an, t| an.classify(t.a(0)?.inv()));
    symbolic(Criterion::Carleman, None, rows.and_then(|r| decide_series(&r))).unwrap_or_else(|| {
        numeric_series(Criterion::Carleman, None, spec, range, 1, None, |n| Ok((-spec.ln_a(n)?).exp()))
    })
}

/// Dennis–Wall: `Σ |b_n|/(a_n a_{n-1}) = ∞`.
pub fn check_dennis_wall(spec: &CoefficientSpec, range: &NumericRange) -> Verdict {
    let rows = per_context(spec, 2, |an, t| an.classify(t.b(0)?.abs().mul(t.a(0)?.inv()).mul(t.a(-1)?.inv())));
    symbolic(Criterion::DennisWall, None, rows.and_then(|r| decide_series(&r))).unwrap_or_else(|| {
        numeric_series(Criterion::DennisWall, None, spec, range, 2, None, |n| {
            let lb = spec.ln_abs_b(n);
            Ok(if lb == f64::NEG_INFINITY { 0.0 } else { (lb - spec.ln_a(n)? - spec.ln_a(n - 1)?).exp() })
        })
    })
}

/// Janas–Naboko: `lim sup (a_n² + a²_{n-1})/b_n² < 1/2`, together with
/// `|b_n| → ∞`.
pub fn check_janas_naboko(spec: &CoefficientSpec, range: &NumericRange) -> Verdict {
    let rows = per_context(spec, 2, |an, t| {
        let mut acc = Accumulator::default();
        acc.add(t.ratio(0, 0)?.square());
        acc.add(t.ratio(-1, 0)?.square());
        an.dominant(&acc)
    });
    symbolic(Criterion::JanasNaboko, None, rows.and_then(|r| decide_limit(&r, Bound::Below(0.5), true))).unwrap_or_else(
        || {
            numeric_limit(Criterion::JanasNaboko, None, range, 2, Some(0.5), |n| {
                Ok(spec.ratio(n, n).powi(2) + spec.ratio(n - 1, n).powi(2))
            })
        },
    )
}

/// Cojuhari–Janas: `β_n = b_n - a_n - a_{n-1} > 0` eventually, `a_n → ∞` and
/// `β_n + β_{n+1} → ∞`.
pub fn check_cojuhari_janas(spec: &CoefficientSpec, range: &NumericRange) -> Verdict {
    let beta = |t: &ContextTable, d: i64, acc: &mut Accumulator| -> Option<()> {
        acc.add(t.b(d)?);
        acc.add(t.a(d)?.neg());
        acc.add(t.a(d - 1)?.neg());
        Some(())
    };
    let decided = Analyzer::new(spec).and_then(|an| {
        let mut rows = Vec::new();
        let mut violated = None;
        let mut unknown = false;
        for ctx in an.contexts(3) {
            let t = an.table(ctx, 3);
            let mut b0 = Accumulator::default();
            let mut b01 = Accumulator::default();
            let ok = beta(&t, 0, &mut b0).and(beta(&t, 0, &mut b01)).and(beta(&t, 1, &mut b01));
            let (s0, s01, a0) = match ok {
                Some(()) => (an.dominant(&b0), an.dominant(&b01), t.a(0).and_then(|a| an.classify(a))),
                None => (None, None, None),
            };
            let (Some(s0), Some(s01), Some(a0)) = (s0, s01, a0) else {
                unknown = true;
                rows.push(Row { ctx, value: None, b_diverges: None });
                continue;
            };
            let positive = !s0.negative && s0.order != Order::Zero;
            let bad = !positive || !a0.order.diverges() || s01.negative || !s01.order.diverges();
            let row = Row { ctx, value: Some(s0), b_diverges: None };
            if bad && violated.is_none() {
                violated = Some((rows.len(), !positive, !a0.order.diverges()));
            }
            rows.push(row);
        }
        if let Some((i, neg, a_bounded)) = violated {
            let mut ev = decisive_evidence(&rows, Some(&rows[i]));
            ev.notes.push(if neg {
                format!("b_n - a_n - a_(n-1) is eventually negative or vanishing on {}", rows[i].ctx.label())
            } else if a_bounded {
                format!("a_n does not diverge on {}", rows[i].ctx.label())
            } else {
                format!("beta_n + beta_(n+1) does not diverge on {}", rows[i].ctx.label())
            });
            return Some((Outcome::Fails, ev));
        }
        if unknown {
            return None;
        }
        Some((Outcome::Holds, decisive_evidence(&rows, None)))
    });
    symbolic(Criterion::CojuhariJanas, None, decided).unwrap_or_else(|| {
        numeric_limit(Criterion::CojuhariJanas, None, range, 2, None, |n| {
            Ok(spec.eval_b(n)? - spec.eval_a(n)? - spec.eval_a(n - 1)?)
        })
    })
}

/// `|b_n| → ∞` and `a_n, a_{n-1} = o(|b_n|^r)` for one `r < 1`.
pub fn check_weak(spec: &CoefficientSpec, range: &NumericRange) -> Verdict {
    let decided = Analyzer::new(spec).and_then(|an| {
        let mut rows = Vec::new();
        let mut bad = None;
        let mut unknown = false;
        for ctx in an.contexts(2) {
            let t = an.table(ctx, 2);
            let (Some(a0), Some(am), Some(b0)) = (t.a(0), t.a(-1), t.b(0).map(Mono::abs)) else {
                unknown = true;
                continue;
            };
            let b_div = an.classify(b0).map(|s| s.order.diverges());
            let small = an.little_o_power(a0, b0).zip(an.little_o_power(am, b0)).map(|(x, y)| x && y);
            let value = an.classify(a0.mul(b0.inv()));
            match (b_div, small) {
                (Some(true), Some(true)) => {}
                (Some(false), _) | (_, Some(false)) => {
                    bad.get_or_insert(rows.len());
                }
                _ => unknown = true,
            }
            rows.push(Row { ctx, value, b_diverges: b_div });
        }
        let b_flag = Some(rows.iter().all(|r| r.b_diverges == Some(true)));
        if let Some(i) = bad {
            let mut ev = decisive_evidence(&rows, Some(&rows[i]));
            ev.b_diverges = b_flag;
            return Some((Outcome::Fails, ev));
        }
        if unknown {
            return None;
        }
        let top = rows
            .iter()
            .filter(|r| r.value.is_some())
            .max_by(|x, y| order_cmp(&x.value.unwrap().order, &y.value.unwrap().order));
        let mut ev = decisive_evidence(&rows, top);
        ev.b_diverges = b_flag;
        Some((Outcome::Holds, ev))
    });
    symbolic(Criterion::Weak, None, decided).unwrap_or_else(|| {
        numeric_limit(Criterion::Weak, None, range, 2, None, |n| {
            Ok(spec.ln_a(n)?.max(spec.ln_a(n - 1)?) / spec.ln_abs_b(n))
        })
    })
}
