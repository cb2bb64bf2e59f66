//! Leading-order asymptotics of coefficient expressions along residue
//! classes of `n`.
//!
//! Every coefficient near index `n` is written as a [`Mono`]: a signed power
//! `c · n^e` times integer powers of up to four reference sequences whose
//! growth is faster than any power (a multiplicative recursion for `a` or `b`,
//! or the geometric values `base^n` of a squares override). Sums of monomials
//! are reduced to their dominant part by an [`Accumulator`].

use std::collections::BTreeMap;

use num_traits::{Signed as _, Zero};
use serde::{Deserialize, Serialize};

use crate::coeffseq::{Branch, CoefficientSpec, Override, RecursionBase, RecursiveRule, SequenceRule, Sign, Which};
use crate::multiindex::{self, Variant};
use crate::Exponent;

/// Relative tolerance for exact-constant ties and cancellations.
pub(crate) const TIE_RTOL: f64 = 1e-12;

const REFS: usize = 4;
const REF_A_REC: usize = 0;
const REF_B_REC: usize = 1;
const REF_A_SQ: usize = 2;
const REF_B_SQ: usize = 3;

type Sup = [i32; REFS];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Character {
    Growth,
    Decay,
    Neutral,
    Unknown,
}

impl Character {
    fn flip(self) -> Self {
        match self {
            Character::Growth => Character::Decay,
            Character::Decay => Character::Growth,
            other => other,
        }
    }
}

/// Leading-order behaviour of a nonnegative quantity as `n → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Order {
    Zero,
    /// Faster decay than any power of `n`.
    SuperDecay,
    Power {
        #[serde(with = "crate::report::extended")]
        constant: f64,
        #[serde(with = "crate::report::exponent_str")]
        exponent: Exponent,
    },
    /// Faster growth than any power of `n`.
    SuperGrowth,
    Infinite,
}

impl Order {
    pub fn exponent(&self) -> Option<Exponent> {
        match self {
            Order::Power { exponent, .. } => Some(*exponent),
            _ => None,
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Order::Power { constant, .. } => Some(*constant),
            _ => None,
        }
    }

    /// True when the quantity tends to `+∞`.
    pub fn diverges(&self) -> bool {
        match self {
            Order::Power { exponent, .. } => exponent.is_positive(),
            Order::SuperGrowth | Order::Infinite => true,
            Order::Zero | Order::SuperDecay => false,
        }
    }

    /// True when the quantity tends to `0`.
    pub fn vanishes(&self) -> bool {
        match self {
            Order::Power { exponent, .. } => exponent.is_negative(),
            Order::Zero | Order::SuperDecay => true,
            Order::SuperGrowth | Order::Infinite => false,
        }
    }

    pub fn inv(self) -> Order {
        match self {
            Order::Zero => Order::Infinite,
            Order::SuperDecay => Order::SuperGrowth,
            Order::Power { constant, exponent } => Order::Power { constant: 1.0 / constant, exponent: -exponent },
            Order::SuperGrowth => Order::SuperDecay,
            Order::Infinite => Order::Zero,
        }
    }
}

/// An [`Order`] together with the sign of the dominant part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Signed {
    pub negative: bool,
    pub order: Order,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Mono {
    Zero,
    Infinite,
    Term { negative: bool, c: f64, e: Exponent, sup: Sup },
}

impl Mono {
    fn power(negative: bool, c: f64, e: Exponent) -> Self {
        Mono::Term { negative, c, e, sup: [0; REFS] }
    }

    fn one() -> Self {
        Mono::power(false, 1.0, Exponent::zero())
    }

    fn with_ref(self, r: usize, k: i32) -> Self {
        match self {
            Mono::Term { negative, c, e, mut sup } => {
                sup[r] += k;
                Mono::Term { negative, c, e, sup }
            }
            other => other,
        }
    }

    pub fn mul(self, other: Mono) -> Mono {
        match (self, other) {
            (Mono::Infinite, _) | (_, Mono::Infinite) => Mono::Infinite,
            (Mono::Zero, _) | (_, Mono::Zero) => Mono::Zero,
            (
                Mono::Term { negative: n1, c: c1, e: e1, sup: s1 },
                Mono::Term { negative: n2, c: c2, e: e2, sup: s2 },
            ) => {
                let mut sup = s1;
                for (x, y) in sup.iter_mut().zip(s2) {
                    *x += y;
                }
                Mono::Term { negative: n1 ^ n2, c: c1 * c2, e: e1 + e2, sup }
            }
        }
    }

    pub fn inv(self) -> Mono {
        match self {
            Mono::Zero => Mono::Infinite,
            Mono::Infinite => Mono::Zero,
            Mono::Term { negative, c, e, sup } => Mono::Term { negative, c: 1.0 / c, e: -e, sup: sup.map(|s| -s) },
        }
    }

    pub fn abs(self) -> Mono {
        match self {
            Mono::Term { c, e, sup, .. } => Mono::Term { negative: false, c, e, sup },
            other => other,
        }
    }

    pub fn neg(self) -> Mono {
        match self {
            Mono::Term { negative, c, e, sup } => Mono::Term { negative: !negative, c, e, sup },
            other => other,
        }
    }

    pub fn square(self) -> Mono {
        self.mul(self)
    }
}

/// Sums monomials, grouping equal reference powers and exponents.
#[derive(Default)]
pub(crate) struct Accumulator {
    terms: BTreeMap<(Sup, Exponent), (f64, f64)>,
    infinite: bool,
}

impl Accumulator {
    pub fn add(&mut self, m: Mono) {
        match m {
            Mono::Zero => {}
            Mono::Infinite => self.infinite = true,
            Mono::Term { negative, c, e, sup } => {
                let slot = self.terms.entry((sup, e)).or_insert((0.0, 0.0));
                slot.0 += if negative { -c } else { c };
                slot.1 += c;
            }
        }
    }

    /// Aggregated `(constant, exponent)` pairs in decreasing exponent order,
    /// when every term is a plain positive power.
    pub fn power_terms(&self) -> Option<Vec<(f64, Exponent)>> {
        if self.infinite {
            return None;
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for ((sup, e), (sum, _)) in self.terms.iter().rev() {
            if *sup != [0; REFS] || *sum <= 0.0 {
                return None;
            }
            out.push((*sum, *e));
        }
        Some(out)
    }
}

/// Where along the integers a context sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    /// `n mod modulus`.
    pub class: u64,
    pub modulus: u64,
    /// `Some(d)` when `n + d` is a perfect square (sparse-override hit).
    pub hit: Option<i64>,
}

impl Context {
    pub fn label(&self) -> String {
        let base = format!("n ≡ {} (mod {})", self.class, self.modulus);
        match self.hit {
            None => base,
            Some(0) => format!("n ∈ Δ, {base}"),
            Some(d) if d > 0 => format!("n+{d} ∈ Δ, {base}"),
            Some(d) => format!("n-{} ∈ Δ, {base}", -d),
        }
    }
}

/// Cached coefficient monomials around one context.
pub(crate) struct ContextTable {
    window: i64,
    a: Vec<Option<Mono>>,
    b: Vec<Option<Mono>>,
}

impl ContextTable {
    pub fn a(&self, d: i64) -> Option<Mono> {
        self.a[(d + self.window) as usize]
    }

    pub fn b(&self, d: i64) -> Option<Mono> {
        self.b[(d + self.window) as usize]
    }

    /// `a_{n+da} / |b_{n+db}|`.
    pub fn ratio(&self, da: i64, db: i64) -> Option<Mono> {
        Some(self.a(da)?.mul(self.b(db)?.abs().inv()))
    }
}

pub(crate) struct Analyzer<'a> {
    spec: &'a CoefficientSpec,
    modulus: u64,
    chars: [Character; REFS],
}

fn recursion_character(rule: &RecursiveRule) -> Character {
    let trivial = rule
        .factors()
        .iter()
        .all(|f| f.term.constant() == 1.0 && f.term.exponent().is_zero() && f.sign == Sign::Positive);
    if trivial {
        return Character::Neutral;
    }
    let e: Exponent = rule.factors().iter().map(|f| f.term.exponent()).sum();
    if e.is_positive() {
        return Character::Growth;
    }
    if e.is_negative() {
        return Character::Decay;
    }
    let ln_p: f64 = rule.factors().iter().map(|f| f.term.constant().ln()).sum();
    if ln_p > TIE_RTOL {
        Character::Growth
    } else if ln_p < -TIE_RTOL {
        Character::Decay
    } else {
        Character::Unknown
    }
}

fn branch_mono(br: &Branch) -> Mono {
    match br.sign {
        Sign::Zero => Mono::Zero,
        s => Mono::power(s == Sign::Negative, br.term.constant(), br.term.exponent()),
    }
}

fn residue(class: u64, d: i64, q: u64) -> u64 {
    (class as i64 + d).rem_euclid(q as i64) as u64
}

impl<'a> Analyzer<'a> {
    /// Returns `None` when the operator has a shape the engine does not model:
    /// explicit list overrides, or a `b` recursion through its own previous
    /// value with sign changes or zero factors.
    pub fn new(spec: &'a CoefficientSpec) -> Option<Self> {
        let mut chars = [Character::Neutral; REFS];
        for which in [Which::A, Which::B] {
            match spec.rule(which) {
                SequenceRule::Branches(rule) => match rule.overrides() {
                    None => {}
                    Some(Override::List(_)) => return None,
                    Some(Override::Squares { .. }) => {
                        chars[if which == Which::A { REF_A_SQ } else { REF_B_SQ }] = Character::Decay;
                    }
                },
                SequenceRule::Recursive(rule) => {
                    if rule.base() == RecursionBase::Previous {
                        if rule.seed() == 0.0 || rule.factors().iter().any(|f| f.sign != Sign::Positive) {
                            return None;
                        }
                        chars[if which == Which::A { REF_A_REC } else { REF_B_REC }] = recursion_character(rule);
                    }
                }
            }
        }
        let mut modulus = spec.sequence_modulus();
        if modulus == 0 {
            modulus = 1;
        }
        Some(Self { spec, modulus, chars })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn has_squares(&self) -> bool {
        self.chars[REF_A_SQ] == Character::Decay || self.chars[REF_B_SQ] == Character::Decay
    }

    /// Base contexts (one per class), plus hit contexts for every offset
    /// `|d| <= window` when a squares override is present.
    pub fn contexts(&self, window: i64) -> Vec<Context> {
        let l = self.modulus;
        let mut out: Vec<Context> = (0..l).map(|class| Context { class, modulus: l, hit: None }).collect();
        if self.has_squares() {
            let mut sq: Vec<u64> = (0..l).map(|s| (s * s) % l).collect();
            sq.sort_unstable();
            sq.dedup();
            for d in -window..=window {
                for &r in &sq {
                    out.push(Context { class: residue(r, -d, l), modulus: l, hit: Some(d) });
                }
            }
        }
        out
    }

    pub fn table(&self, ctx: Context, window: i64) -> ContextTable {
        let a = (-window..=window).map(|d| self.coef(Which::A, ctx, d)).collect();
        let b = (-window..=window).map(|d| self.coef(Which::B, ctx, d)).collect();
        ContextTable { window, a, b }
    }

    /// `x_{n+d} / x_n` for a `Previous` recursion along the class.
    fn relative(rule: &RecursiveRule, class: u64, d: i64) -> Mono {
        let q = rule.modulus() as u64;
        let factor = |t: i64| branch_mono(&rule.factors()[residue(class, t, q) as usize]);
        let mut m = Mono::one();
        if d > 0 {
            for t in 1..=d {
                m = m.mul(factor(t));
            }
        } else {
            for t in (d + 1)..=0 {
                m = m.mul(factor(t).inv());
            }
        }
        m
    }

    fn coef(&self, which: Which, ctx: Context, d: i64) -> Option<Mono> {
        match self.spec.rule(which) {
            SequenceRule::Branches(rule) => {
                if let (Some(Override::Squares { base, sign }), Some(h)) = (rule.overrides(), ctx.hit) {
                    if h == d {
                        let r = if which == Which::A { REF_A_SQ } else { REF_B_SQ };
                        return Some(match sign {
                            Sign::Zero => Mono::Zero,
                            s => {
                                Mono::power(*s == Sign::Negative, base.powi(d as i32), Exponent::zero()).with_ref(r, 1)
                            }
                        });
                    }
                }
                let q = rule.modulus() as u64;
                Some(branch_mono(&rule.branches()[residue(ctx.class, d, q) as usize]))
            }
            SequenceRule::Recursive(rule) => match rule.base() {
                RecursionBase::Previous => {
                    let r = if which == Which::A { REF_A_REC } else { REF_B_REC };
                    let rel = Self::relative(rule, ctx.class, d);
                    match self.chars[r] {
                        Character::Neutral => Some(rel.mul(Mono::power(false, rule.seed().abs(), Exponent::zero()))),
                        _ => Some(rel.with_ref(r, 1)),
                    }
                }
                RecursionBase::PreviousA => {
                    let q = rule.modulus() as u64;
                    let f = branch_mono(&rule.factors()[residue(ctx.class, d, q) as usize]);
                    Some(f.mul(self.coef(Which::A, ctx, d - 1)?))
                }
            },
        }
    }

    fn character(&self, sup: &Sup) -> Character {
        let mut out = Character::Neutral;
        for (i, &k) in sup.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let c = if k > 0 { self.chars[i] } else { self.chars[i].flip() };
            if matches!(c, Character::Unknown | Character::Neutral) {
                return Character::Unknown;
            }
            if out == Character::Neutral {
                out = c;
            } else if out != c {
                return Character::Unknown;
            }
        }
        out
    }

    /// Dominant part of an accumulated sum; `None` when it cannot be
    /// resolved at leading order.
    pub fn dominant(&self, acc: &Accumulator) -> Option<Signed> {
        if acc.infinite {
            return Some(Signed { negative: false, order: Order::Infinite });
        }
        let mut sups: Vec<Sup> = acc.terms.keys().map(|(s, _)| *s).collect();
        sups.dedup();
        let mut best = match sups.first() {
            None => return Some(Signed { negative: false, order: Order::Zero }),
            Some(s) => *s,
        };
        let diff = |x: &Sup, y: &Sup| -> Sup { std::array::from_fn(|i| x[i] - y[i]) };
        for s in &sups[1..] {
            match self.character(&diff(s, &best)) {
                Character::Growth => best = *s,
                Character::Decay => {}
                _ => return None,
            }
        }
        if sups.iter().any(|s| *s != best && self.character(&diff(&best, s)) != Character::Growth) {
            return None;
        }
        let (e, sum, abs) = acc
            .terms
            .iter()
            .filter(|((s, _), _)| *s == best)
            .map(|((_, e), (sum, abs))| (*e, *sum, *abs))
            .next_back()?;
        if sum.abs() <= TIE_RTOL * abs {
            return None;
        }
        let order = if best == [0; REFS] {
            Order::Power { constant: sum.abs(), exponent: e }
        } else {
            match self.character(&best) {
                Character::Growth => Order::SuperGrowth,
                Character::Decay => Order::SuperDecay,
                _ => return None,
            }
        };
        Some(Signed { negative: sum < 0.0, order })
    }

    pub fn classify(&self, m: Mono) -> Option<Signed> {
        let mut acc = Accumulator::default();
        acc.add(m);
        self.dominant(&acc)
    }

    /// Whether `|x| = o(|y|^r)` for some `r < 1`, given that `|y| → ∞`.
    pub fn little_o_power(&self, x: Mono, y: Mono) -> Option<bool> {
        let (ex, sx) = match x {
            Mono::Zero => return Some(true),
            Mono::Infinite => return Some(false),
            Mono::Term { e, sup, .. } => (e, sup),
        };
        let Mono::Term { e: ey, sup: sy, .. } = y else {
            return None;
        };
        let plain = [0; REFS];
        if sy == plain {
            return match (sx == plain, self.character(&sx)) {
                (true, _) => Some(ex < ey),
                (false, Character::Decay) => Some(true),
                (false, Character::Growth) => Some(false),
                _ => None,
            };
        }
        if sx == plain {
            return Some(true);
        }
        let i = sy.iter().position(|&k| k != 0)?;
        let proportional = (0..REFS).all(|j| sx[j] * sy[i] == sy[j] * sx[i]);
        if proportional {
            return Some(Exponent::new(sx[i] as i64, sy[i] as i64) < Exponent::from_integer(1));
        }
        (self.character(&sx) == Character::Decay).then_some(true)
    }
}

/// Which ratio sum to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    /// `a_n · G⁺_{m,n}`.
    GPlusTimesA,
    /// `a_n · G_{m,n}`.
    GFullTimesA,
    /// `G̃_{m,n}`.
    GTilde,
    /// `G_{m,n}` without the leading `a_n`.
    GFull,
}

impl ProductKind {
    /// Largest coefficient offset the expansion touches at depth `m`.
    pub fn window(self, m: usize) -> i64 {
        2 * m as i64 + 2
    }
}

/// Accumulates the terms of the chosen ratio sum in one context.
pub(crate) fn expand(table: &ContextTable, kind: ProductKind, m: usize) -> Option<Accumulator> {
    let variant = match kind {
        ProductKind::GPlusTimesA => Variant::IPlus,
        ProductKind::GFullTimesA | ProductKind::GFull => Variant::I,
        ProductKind::GTilde => Variant::IHat,
    };
    let lead = match kind {
        ProductKind::GPlusTimesA | ProductKind::GFullTimesA => table.a(0)?,
        _ => Mono::one(),
    };
    let mut acc = Accumulator::default();
    let mut failed = false;
    multiindex::for_each(variant, m, |j, k| {
        if failed {
            return;
        }
        let mut t = lead;
        for s in 0..m {
            let f = if kind == ProductKind::GTilde {
                let jl = j[m] as i64;
                table.ratio(jl - k[s] as i64, jl - j[s] as i64).map(Mono::square)
            } else {
                table.ratio(-(k[s] as i64), -(j[s] as i64))
            };
            match f {
                Some(f) => t = t.mul(f),
                None => {
                    failed = true;
                    return;
                }
            }
        }
        acc.add(t);
    })
    .ok()?;
    (!failed).then_some(acc)
}

/// True when `dist(n, Δ) < radius` for `Δ` the positive perfect squares.
pub(crate) fn is_near_square(n: u64, radius: u64) -> bool {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1).max(1)..=r + 2).any(|s| (s * s).abs_diff(n) < radius)
}
