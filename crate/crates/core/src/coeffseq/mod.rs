//! Coefficient sequences `a_n > 0` and `b_n ∈ ℝ` of a Jacobi operator.
//!
//! A sequence is either a power law chosen per residue class of `n`
//! (optionally with a sparse override) or a multiplicative recursion
//! `x_n = f(n) · x_{n-1}` / `b_n = f(n) · a_{n-1}`. Exponents are exact
//! rationals so that the symbolic criteria never compare rounded numbers.

mod config;

use std::sync::{Arc, RwLock};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use config::{BranchDocument, OverrideDocument, RecursiveDocument, RelativeTo, SequenceDocument, SpecDocument};

use crate::{Error, Exponent, Result};

/// Builds an exponent `num/den`, rejecting a zero denominator.
pub fn exponent(num: i64, den: i64) -> Result<Exponent> {
    if den == 0 {
        return Err(Error::Config("exponent denominator must be nonzero".into()));
    }
    Ok(Exponent::new(num, den))
}

/// Which of the two coefficient sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn from_i8(s: i8) -> Result<Self> {
        match s {
            -1 => Ok(Sign::Negative),
            0 => Ok(Sign::Zero),
            1 => Ok(Sign::Positive),
            other => Err(Error::Config(format!("sign must be -1, 0 or 1, got {other}"))),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn times(self, other: Sign) -> Sign {
        match self.as_i8() * other.as_i8() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// `constant · n^exponent` with `constant > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    constant: f64,
    exponent: Exponent,
}

impl PowerTerm {
    pub fn new(constant: f64, exponent: Exponent) -> Result<Self> {
        if !(constant.is_finite() && constant > 0.0) {
            return Err(Error::Config(format!("power-term constant must be finite and positive, got {constant}")));
        }
        Ok(Self { constant, exponent })
    }

    pub fn unit() -> Self {
        Self { constant: 1.0, exponent: Exponent::zero() }
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn eval(&self, n: u64) -> f64 {
        let x = n as f64;
        let p = if self.exponent.is_integer() {
            match self.exponent.to_integer().to_i32() {
                Some(e) => x.powi(e),
                None => x.powf(exponent_f64(self.exponent)),
            }
        } else {
            x.powf(exponent_f64(self.exponent))
        };
        self.constant * p
    }

    pub fn ln_eval(&self, n: u64) -> f64 {
        self.constant.ln() + exponent_f64(self.exponent) * (n as f64).ln()
    }
}

pub(crate) fn exponent_f64(e: Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// A signed power term attached to one residue class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch {
    pub term: PowerTerm,
    pub sign: Sign,
}

impl Branch {
    pub fn power(constant: f64, exponent: Exponent) -> Result<Self> {
        Ok(Self { term: PowerTerm::new(constant, exponent)?, sign: Sign::Positive })
    }

    pub fn signed(constant: f64, exponent: Exponent, sign: Sign) -> Result<Self> {
        Ok(Self { term: PowerTerm::new(constant, exponent)?, sign })
    }

    pub fn zero() -> Self {
        Self { term: PowerTerm::unit(), sign: Sign::Zero }
    }

    fn entry(&self, n: u64) -> Entry {
        match self.sign {
            Sign::Zero => Entry::ZERO,
            s => Entry { value: s.as_i8() as f64 * self.term.eval(n), ln_abs: self.term.ln_eval(n), sign: s },
        }
    }
}

/// Sparse replacement of a power-law sequence on an index set.
#[derive(Clone, Debug, PartialEq)]
pub enum Override {
    /// Explicit `(index, value)` pairs, strictly increasing in index.
    List(Vec<(u64, f64)>),
    /// `sign · base^n` on the perfect squares `n = k²`, `0 < base < 1`.
    Squares { base: f64, sign: Sign },
}

impl Override {
    fn entry(&self, n: u64) -> Option<Entry> {
        match self {
            Override::List(entries) => {
                entries.binary_search_by_key(&n, |(i, _)| *i).ok().map(|pos| Entry::from_value(entries[pos].1))
            }
            Override::Squares { base, sign } => {
                if !is_square(n) {
                    return None;
                }
                Some(match sign {
                    Sign::Zero => Entry::ZERO,
                    s => {
                        Entry { value: s.as_i8() as f64 * base.powf(n as f64), ln_abs: n as f64 * base.ln(), sign: *s }
                    }
                })
            }
        }
    }
}

pub(crate) fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|k| k.checked_mul(k) == Some(n))
}

/// Power laws per residue class of `n` modulo `modulus`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRule {
    modulus: u32,
    branches: Vec<Branch>,
    overrides: Option<Override>,
}

impl BranchRule {
    pub fn single(branch: Branch) -> Self {
        Self { modulus: 1, branches: vec![branch], overrides: None }
    }

    /// `branches[r]` applies to `n ≡ r (mod branches.len())`.
    pub fn periodic(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Config("a branch rule needs at least one branch".into()));
        }
        let modulus = u32::try_from(branches.len()).map_err(|_| Error::Config("modulus too large".into()))?;
        Ok(Self { modulus, branches, overrides: None })
    }

    pub fn with_override(mut self, ov: Override) -> Result<Self> {
        match &ov {
            Override::List(entries) => {
                if entries.iter().any(|(i, v)| *i == 0 || !v.is_finite()) {
                    return Err(Error::Config("override indices must be >= 1 with finite values".into()));
                }
                if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::Config("override indices must be strictly increasing".into()));
                }
            }
            Override::Squares { base, .. } => {
                if !(*base > 0.0 && *base < 1.0) {
                    return Err(Error::Config(format!("squares override base must lie in (0, 1), got {base}")));
                }
            }
        }
        self.overrides = Some(ov);
        Ok(self)
    }

    /// Replaces the branch on `n ≡ residue (mod modulus)`, refining the
    /// period to the least common multiple of both moduli.
    pub fn with_residue_override(self, modulus: u32, residue: u32, branch: Branch) -> Result<Self> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::Config(format!(
                "residue override needs 0 <= residue < modulus, got {residue} mod {modulus}"
            )));
        }
        let l = self.modulus.lcm(&modulus);
        let branches = (0..l)
            .map(|r| if r % modulus == residue { branch } else { self.branches[(r % self.modulus) as usize] })
            .collect();
        Ok(Self { modulus: l, branches, overrides: self.overrides })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn overrides(&self) -> Option<&Override> {
        self.overrides.as_ref()
    }

    pub fn branch_for(&self, n: u64) -> &Branch {
        &self.branches[(n % self.modulus as u64) as usize]
    }

    fn entry(&self, n: u64) -> Entry {
        if let Some(e) = self.overrides.as_ref().and_then(|o| o.entry(n)) {
            return e;
        }
        self.branch_for(n).entry(n)
    }
}

/// What the multiplicative recursion multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecursionBase {
    /// `x_n = f(n) · x_{n-1}`.
    Previous,
    /// `b_n = f(n) · a_{n-1}` (only valid for `b`).
    PreviousA,
}

/// `x_1 = seed`, `x_n = f(n) · base(n-1)` with `f` a signed power term per
/// residue class of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursiveRule {
    seed: f64,
    factors: Vec<Branch>,
    base: RecursionBase,
}

impl RecursiveRule {
    pub fn new(seed: f64, factors: Vec<Branch>, base: RecursionBase) -> Result<Self> {
        if !seed.is_finite() {
            return Err(Error::Config("recursion seed must be finite".into()));
        }
        if factors.is_empty() {
            return Err(Error::Config("recursion needs at least one factor".into()));
        }
        Ok(Self { seed, factors, base })
    }

    pub fn seed(&self) -> f64 {
        self.seed
    }

    pub fn factors(&self) -> &[Branch] {
        &self.factors
    }

    pub fn base(&self) -> RecursionBase {
        self.base
    }

    pub fn modulus(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn factor_for(&self, n: u64) -> &Branch {
        &self.factors[(n % self.factors.len() as u64) as usize]
    }

    fn seed_entry(&self) -> Entry {
        Entry::from_value(self.seed)
    }

    fn step(&self, prev: Entry, n: u64) -> Entry {
        prev.times(self.factor_for(n).entry(n))
    }

    /// Evaluates a `Previous` recursion by unrolling from the seed without
    /// touching any memo table. Returns `(value, ln|value|)`.
    pub fn unrolled(&self, n: u64) -> (f64, f64) {
        let mut e = self.seed_entry();
        for k in 2..=n {
            e = self.step(e, k);
        }
        (e.value, e.ln_abs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceRule {
    Branches(BranchRule),
    Recursive(RecursiveRule),
}

impl SequenceRule {
    pub fn modulus(&self) -> u32 {
        match self {
            SequenceRule::Branches(r) => r.modulus(),
            SequenceRule::Recursive(r) => r.modulus(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Entry {
    pub value: f64,
    pub ln_abs: f64,
    pub sign: Sign,
}

impl Entry {
    const ZERO: Entry = Entry { value: 0.0, ln_abs: f64::NEG_INFINITY, sign: Sign::Zero };

    fn from_value(v: f64) -> Self {
        Entry { value: v, ln_abs: v.abs().ln(), sign: Sign::of(v) }
    }

    fn times(self, other: Entry) -> Entry {
        Entry { value: self.value * other.value, ln_abs: self.ln_abs + other.ln_abs, sign: self.sign.times(other.sign) }
    }
}

/// Insert-once memo of a `Previous` recursion, indexed by `n - 1`.
#[derive(Default)]
struct Memo {
    table: RwLock<Vec<Entry>>,
}

impl Memo {
    fn get(&self, rule: &RecursiveRule, n: u64) -> Entry {
        let idx = (n - 1) as usize;
        if let Some(e) = self.table.read().expect("memo lock poisoned").get(idx) {
            return *e;
        }
        let mut table = self.table.write().expect("memo lock poisoned");
        if table.is_empty() {
            table.push(rule.seed_entry());
        }
        while table.len() <= idx {
            let k = table.len() as u64 + 1;
            let next = rule.step(*table.last().expect("nonempty"), k);
            table.push(next);
        }
        table[idx]
    }
}

/// The pair of coefficient sequences defining the operator.
#[derive(Clone)]
pub struct CoefficientSpec {
    a: SequenceRule,
    b: SequenceRule,
    memo_a: Arc<Memo>,
    memo_b: Arc<Memo>,
}

impl std::fmt::Debug for CoefficientSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientSpec").field("a", &self.a).field("b", &self.b).finish()
    }
}

impl PartialEq for CoefficientSpec {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl CoefficientSpec {
    pub fn new(a: SequenceRule, b: SequenceRule) -> Result<Self> {
        match &a {
            SequenceRule::Branches(rule) => {
                if rule.branches.iter().any(|br| br.sign != Sign::Positive) {
                    return Err(Error::Config("every branch of a must have sign +1".into()));
                }
                match &rule.overrides {
                    Some(Override::List(entries)) if entries.iter().any(|(_, v)| *v <= 0.0) => {
                        return Err(Error::Config("override values of a must be positive".into()))
                    }
                    Some(Override::Squares { sign, .. }) if *sign != Sign::Positive => {
                        return Err(Error::Config("squares override of a must have sign +1".into()))
                    }
                    _ => {}
                }
            }
            SequenceRule::Recursive(rule) => {
                if rule.base == RecursionBase::PreviousA {
                    return Err(Error::Config("a cannot be defined relative to itself as a_prev".into()));
                }
                if rule.seed <= 0.0 || rule.factors.iter().any(|f| f.sign != Sign::Positive) {
                    return Err(Error::Config("a recursion needs a positive seed and positive factors".into()));
                }
            }
        }
        Ok(Self { a, b, memo_a: Arc::default(), memo_b: Arc::default() })
    }

    /// `a_n = ca · n^ea`, `b_n = cb · n^eb` on every `n`.
    pub fn power(ca: f64, ea: Exponent, cb: f64, eb: Exponent) -> Result<Self> {
        Self::new(
            SequenceRule::Branches(BranchRule::single(Branch::power(ca, ea)?)),
            SequenceRule::Branches(BranchRule::single(Branch::power(cb, eb)?)),
        )
    }

    /// `a_n` given by the table for `n <= a.len()` and `1` beyond; `b_n`
    /// tabulated for `n <= b.len()` and `0` beyond.
    pub fn tabulated(a: &[f64], b: &[f64]) -> Result<Self> {
        let list = |v: &[f64]| v.iter().enumerate().map(|(i, x)| (i as u64 + 1, *x)).collect();
        Self::new(
            SequenceRule::Branches(
                BranchRule::single(Branch::power(1.0, Exponent::zero())?).with_override(Override::List(list(a)))?,
            ),
            SequenceRule::Branches(BranchRule::single(Branch::zero()).with_override(Override::List(list(b)))?),
        )
    }

    pub fn rule(&self, which: Which) -> &SequenceRule {
        match which {
            Which::A => &self.a,
            Which::B => &self.b,
        }
    }

    pub(crate) fn sequence_modulus(&self) -> u64 {
        let mut l = (self.a.modulus() as u64).lcm(&(self.b.modulus() as u64));
        if let SequenceRule::Recursive(r) = &self.b {
            if r.base == RecursionBase::PreviousA {
                l = l.lcm(&(self.a.modulus() as u64));
            }
        }
        l
    }

    /// True when some sequence carries a squares override.
    pub fn has_squares_override(&self) -> bool {
        [&self.a, &self.b]
            .iter()
            .any(|r| matches!(r, SequenceRule::Branches(BranchRule { overrides: Some(Override::Squares { .. }), .. })))
    }

    pub fn has_sparse_override(&self) -> bool {
        [&self.a, &self.b].iter().any(|r| matches!(r, SequenceRule::Branches(BranchRule { overrides: Some(_), .. })))
    }

    pub(crate) fn entry(&self, which: Which, n: u64) -> Entry {
        if n == 0 {
            return Entry::ZERO;
        }
        match (which, self.rule(which)) {
            (_, SequenceRule::Branches(rule)) => rule.entry(n),
            (Which::A, SequenceRule::Recursive(rule)) => self.memo_a.get(rule, n),
            (Which::B, SequenceRule::Recursive(rule)) => match rule.base {
                RecursionBase::Previous => self.memo_b.get(rule, n),
                RecursionBase::PreviousA => {
                    if n == 1 {
                        rule.seed_entry()
                    } else {
                        rule.factor_for(n).entry(n).times(self.entry(Which::A, n - 1))
                    }
                }
            },
        }
    }

    /// `a_n` for `n >= 1`.
    pub fn eval_a(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Argument("coefficient index must be >= 1".into()));
        }
        let v = self.entry(Which::A, n).value;
        if !v.is_finite() {
            return Err(Error::Domain { n, reason: format!("a_n = {v} is not finite") });
        }
        if v <= 0.0 {
            return Err(Error::Domain { n, reason: format!("a_n = {v} is not positive") });
        }
        Ok(v)
    }

    /// `b_n` for `n >= 1`; zero and negative values are allowed.
    pub fn eval_b(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Argument("coefficient index must be >= 1".into()));
        }
        let v = self.entry(Which::B, n).value;
        if !v.is_finite() {
            return Err(Error::Domain { n, reason: format!("b_n = {v} is not finite") });
        }
        Ok(v)
    }

    /// `ln a_n`, finite even where `a_n` itself overflows.
    pub fn ln_a(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Argument("coefficient index must be >= 1".into()));
        }
        let e = self.entry(Which::A, n);
        if e.sign != Sign::Positive || !e.ln_abs.is_finite() {
            return Err(Error::Domain { n, reason: "a_n is not a finite positive number".into() });
        }
        Ok(e.ln_abs)
    }

    /// `ln |b_n|`; `-inf` when `b_n = 0`.
    pub fn ln_abs_b(&self, n: u64) -> f64 {
        self.entry(Which::B, n).ln_abs
    }

    pub fn sign_b(&self, n: u64) -> Sign {
        self.entry(Which::B, n).sign
    }

    /// `a_x / |b_y|` with `a_0 = 0`; `+inf` when `b_y = 0` and `a_x > 0`.
    ///
    /// Recursions defining `b` through `a_{n-1}` are divided structurally so
    /// that the ratio stays exact even where both values overflow.
    pub fn ratio(&self, x: u64, y: u64) -> f64 {
        if x == 0 {
            return 0.0;
        }
        if let SequenceRule::Recursive(rb) = &self.b {
            if rb.base == RecursionBase::PreviousA && y >= 2 {
                let f = rb.factor_for(y).entry(y);
                if f.sign == Sign::Zero {
                    return f64::INFINITY;
                }
                return self.quotient_a(x, y - 1) / f.value.abs();
            }
        }
        let ea = self.entry(Which::A, x);
        let eb = self.entry(Which::B, y);
        if eb.sign == Sign::Zero {
            return f64::INFINITY;
        }
        let (va, vb) = (ea.value, eb.value.abs());
        if va.is_normal() && vb.is_normal() {
            let r = va / vb;
            if r.is_normal() {
                return r;
            }
        }
        (ea.ln_abs - eb.ln_abs).exp()
    }

    /// `a_x / a_z` for `x, z >= 1`.
    fn quotient_a(&self, x: u64, z: u64) -> f64 {
        if x == z {
            return 1.0;
        }
        if let SequenceRule::Recursive(ra) = &self.a {
            let (lo, hi) = if x > z { (z, x) } else { (x, z) };
            if hi - lo <= 64 {
                let p: f64 = (lo + 1..=hi).map(|k| ra.factor_for(k).entry(k).value).product();
                return if x > z { p } else { 1.0 / p };
            }
        }
        let ea = self.entry(Which::A, x);
        let ez = self.entry(Which::A, z);
        if ea.value.is_normal() && ez.value.is_normal() {
            let r = ea.value / ez.value;
            if r.is_normal() {
                return r;
            }
        }
        (ea.ln_abs - ez.ln_abs).exp()
    }

    /// Power-law exponent of the chosen sequence on the residue class
    /// `residue (mod modulus)` of that sequence, when it is a pure power
    /// family there.
    pub fn asymptotic_exponent(&self, which: Which, residue: u64) -> Option<Exponent> {
        match self.rule(which) {
            SequenceRule::Branches(rule) => {
                if rule.overrides.is_some() {
                    return None;
                }
                let br = rule.branch_for(residue);
                (br.sign != Sign::Zero).then_some(br.term.exponent())
            }
            // Only the trivial telescoping (all factors equal to one) keeps a
            // recursion a pure power law.
            SequenceRule::Recursive(rule) => {
                let trivial = rule.base == RecursionBase::Previous
                    && rule.seed != 0.0
                    && rule
                        .factors
                        .iter()
                        .all(|f| f.sign == Sign::Positive && f.term.constant() == 1.0 && f.term.exponent().is_zero());
                trivial.then(Exponent::zero)
            }
        }
    }
}
