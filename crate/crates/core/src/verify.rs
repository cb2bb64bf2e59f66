//! Seeded identity suites that cross-check independent code paths.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cfrac::{approximant_of, relative_deviation, resolvent_11};
use crate::coeffseq::{Branch, BranchRule, CoefficientSpec, SequenceRule, Sign};
use crate::conditions::{g_full, g_plus_times_a, g_tilde, recursion_check_g_tilde};
use crate::multiindex::{self, Variant};
use crate::orthopoly::{cd_sweep, zeros_by_sign_changes};
use crate::spectra::{
    delta_expansion, eigenvalues, eigenvector, embedded_residual_sq, f_bound, interlacing_check, residual_split,
    truncate, Truncation,
};
use crate::{Error, Exponent, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplies every suite's base tolerance; `0` makes every
    /// floating-point comparison fail.
    pub tolerance: f64,
    /// Negative control: flips the sign of one off-diagonal entry in every
    /// random truncation.
    pub corrupt_offdiag_sign: bool,
    /// Number of random truncations for the last-coordinate suites.
    pub truncations: usize,
    /// Number of random coefficient specs for the sequence-level suites.
    pub specs: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 20240611, tolerance: 1.0, corrupt_offdiag_sign: false, truncations: 200, specs: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub skipped: usize,
    /// Worst relative deviation seen, where the suite measures one.
    pub max_deviation: f64,
    /// First few failures, human readable.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

struct Suite {
    res: SuiteResult,
    tol: f64,
}

impl Suite {
    fn new(name: &str, base_tol: f64, cfg: &VerifyConfig) -> Self {
        let res = SuiteResult {
            name: name.into(),
            passed: true,
            checked: 0,
            skipped: 0,
            max_deviation: 0.0,
            failures: Vec::new(),
        };
        Self { res, tol: base_tol * cfg.tolerance }
    }

    fn fail(&mut self, what: String) {
        self.res.passed = false;
        if self.res.failures.len() < 8 {
            self.res.failures.push(what);
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.res.checked += 1;
        if !ok {
            self.fail(what());
        }
    }

    /// Strict comparison, so a zero tolerance never passes.
    fn close(&mut self, x: f64, y: f64, what: impl FnOnce() -> String) {
        let scale = x.abs().max(y.abs());
        let dev = if scale == 0.0 { 0.0 } else { (x - y).abs() / scale };
        self.res.max_deviation = self.res.max_deviation.max(dev);
        self.check(dev < self.tol, || format!("{} (relative deviation {dev:e})", what()));
    }

    fn error(&mut self, e: Error) {
        self.res.checked += 1;
        self.fail(format!("error: {e}"));
    }
}

/// Random truncation with `b ∈ [-5, 5]` and `a ∈ [0.1, 3]`.
pub fn random_truncation(rng: &mut impl Rng, n: usize) -> Truncation {
    let diag = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let offdiag = (1..n).map(|_| rng.gen_range(0.1..3.0)).collect();
    Truncation { diag, offdiag, edge: rng.gen_range(0.1..3.0) }
}

/// Random positive power-law spec with one or two residue classes,
/// exponents in `[-2, 2]` with denominators up to 3, and `b` of either sign.
pub fn random_spec(rng: &mut impl Rng) -> CoefficientSpec {
    let q = rng.gen_range(1..=2);
    let exp = |rng: &mut dyn rand::RngCore| {
        let den = rng.gen_range(1..=3);
        Exponent::new(rng.gen_range(-2 * den..=2 * den), den)
    };
    let a: Vec<Branch> =
        (0..q).map(|_| Branch::power(rng.gen_range(0.5..2.0), exp(rng)).expect("positive constant")).collect();
    let b: Vec<Branch> = (0..q)
        .map(|_| {
            let sign = if rng.gen_bool(0.8) { Sign::Positive } else { Sign::Negative };
            Branch::signed(rng.gen_range(0.5..2.0), exp(rng), sign).expect("positive constant")
        })
        .collect();
    CoefficientSpec::new(
        SequenceRule::Branches(BranchRule::periodic(a).expect("nonempty")),
        SequenceRule::Branches(BranchRule::periodic(b).expect("nonempty")),
    )
    .expect("valid random spec")
}

/// `a_n G⁺_{m,n}` written out term by term for `m <= 4`.
pub fn hand_g_plus_times_a(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    let a = |k: u64| spec.eval_a(k);
    let b = |k: u64| spec.eval_b(k).map(f64::abs);
    Ok(match m {
        1 => a(n)? * a(n - 1)? / b(n)?,
        2 => a(n)? * a(n - 1)? * (a(n - 1)? + a(n - 2)?) / (b(n)? * b(n - 1)?),
        3 => {
            a(n)? * a(n - 1)? / (b(n)? * b(n - 1)?)
                * (a(n - 1)?.powi(2) / b(n)? + a(n - 2)? * (a(n - 2)? + a(n - 3)?) / b(n - 2)?)
        }
        4 => {
            a(n)? * a(n - 1)? / (b(n)? * b(n - 1)?)
                * ((a(n - 1)?.powi(2) / b(n)? + a(n - 2)?.powi(2) / b(n - 2)?) * (a(n - 1)? + a(n - 2)?) / b(n - 1)?
                    + a(n - 2)? * a(n - 3)? * (a(n - 3)? + a(n - 4)?) / (b(n - 2)? * b(n - 3)?))
        }
        _ => return Err(Error::Argument(format!("no written-out formula for m = {m}"))),
    })
}

/// `G_{m,n}` written out for `m <= 2`.
pub fn hand_g_full(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    let a = |k: u64| spec.eval_a(k);
    let b = |k: u64| spec.eval_b(k).map(f64::abs);
    Ok(match m {
        1 => (a(n - 1)? + a(n)?) / b(n)?,
        2 => a(n - 1)? / b(n)? * (a(n - 2)? + a(n - 1)?) / b(n - 1)? + a(n)? / b(n)? * (a(n)? + a(n + 1)?) / b(n + 1)?,
        _ => return Err(Error::Argument(format!("no written-out formula for m = {m}"))),
    })
}

/// `G̃_{m,n}` written out for `m <= 2`, for `n >= 3`.
pub fn hand_g_tilde(spec: &CoefficientSpec, m: usize, n: u64) -> Result<f64> {
    let r = |x: u64, y: u64| -> Result<f64> { Ok((spec.eval_a(x)? / spec.eval_b(y)?).powi(2)) };
    Ok(match m {
        1 => r(n, n + 1)? + r(n - 1, n - 1)?,
        2 => r(n, n + 1)? * (r(n + 1, n + 2)? + r(n, n)?) + r(n - 1, n - 1)? * (r(n - 1, n)? + r(n - 2, n - 2)?),
        _ => return Err(Error::Argument(format!("no written-out formula for m = {m}"))),
    })
}

fn suite_multiindex(cfg: &VerifyConfig) -> SuiteResult {
    let mut s = Suite::new("multiindex_sets", 0.0, cfg);
    for variant in [Variant::I, Variant::IHat, Variant::IPlus, Variant::IHatPlus] {
        for m in 1..=10 {
            match multiindex::generate(variant, m) {
                Ok(set) => {
                    let card = multiindex::cardinality(variant, m).unwrap_or(0);
                    s.check(card == set.len() as u64, || {
                        format!("{variant:?} m={m}: cardinality {card} vs {}", set.len())
                    });
                    for p in &set {
                        s.check(multiindex::satisfies_constraints(p), || format!("{p} violates its constraints"));
                    }
                    s.check(set.windows(2).all(|w| w[0] < w[1]), || format!("{variant:?} m={m} not strictly sorted"));
                }
                Err(e) => s.error(e),
            }
        }
    }
    s.res
}

fn suite_formulas(cfg: &VerifyConfig, specs: &[CoefficientSpec]) -> SuiteResult {
    let mut s = Suite::new("ratio_sum_formulas", 1e-12, cfg);
    for (i, spec) in specs.iter().enumerate() {
        for m in 1..=4usize {
            for n in (m as u64 + 2)..=50 {
                match (g_plus_times_a(spec, m, n), hand_g_plus_times_a(spec, m, n)) {
                    (Ok(x), Ok(y)) => s.close(x, y, || format!("spec {i}: a_n G+ m={m} n={n}")),
                    (Err(e), _) | (_, Err(e)) => s.error(e),
                }
                if m <= 2 {
                    match (g_full(spec, m, n), hand_g_full(spec, m, n)) {
                        (Ok(x), Ok(y)) => s.close(x, y, || format!("spec {i}: G m={m} n={n}")),
                        (Err(e), _) | (_, Err(e)) => s.error(e),
                    }
                    match (g_tilde(spec, m, n), hand_g_tilde(spec, m, n)) {
                        (Ok(x), Ok(y)) => s.close(x, y, || format!("spec {i}: G~ m={m} n={n}")),
                        (Err(e), _) | (_, Err(e)) => s.error(e),
                    }
                }
            }
        }
        for m in 1..=3 {
            match recursion_check_g_tilde(spec, m, 10) {
                Ok(ok) => s.check(ok && cfg.tolerance > 0.0, || format!("spec {i}: G~ recursion m={m}")),
                Err(e) => s.error(e),
            }
        }
    }
    s.res
}

fn suites_last_coordinate(cfg: &VerifyConfig, truncs: &[Truncation]) -> Vec<SuiteResult> {
    let mut expansion = Suite::new("delta_expansion", 1e-10, cfg);
    let mut bound = Suite::new("delta_bound", 1e-12, cfg);
    let mut residual = Suite::new("residual_identity", 1e-10, cfg);
    for (i, t) in truncs.iter().enumerate() {
        let ev = match eigenvalues(t, 1e-14) {
            Ok(ev) => ev,
            Err(e) => {
                expansion.error(e);
                continue;
            }
        };
        for l in ev {
            let pair = match eigenvector(t, l) {
                Ok(p) => p,
                Err(e) => {
                    expansion.error(e);
                    continue;
                }
            };
            for m in 1..=t.len().min(5) {
                match delta_expansion(t, &pair, m) {
                    Ok(d) => expansion.close(d, pair.last_coord, || format!("truncation {i}, lambda {l:e}, m={m}")),
                    Err(Error::DegeneratePivot { .. }) => {
                        expansion.res.skipped += 1;
                        bound.res.skipped += 1;
                        continue;
                    }
                    Err(e) => expansion.error(e),
                }
                match f_bound(t, l, m) {
                    Ok(f) => bound.check(pair.last_coord.abs() <= f * (1.0 + bound.tol), || {
                        format!(
                            "truncation {i}, lambda {l:e}, m={m}: |delta_N| = {:e} > F = {f:e}",
                            pair.last_coord.abs()
                        )
                    }),
                    Err(e) => bound.error(e),
                }
            }
            let target = l + 0.37;
            residual.close(residual_split(t, &pair, target).total, embedded_residual_sq(t, &pair, target), || {
                format!("truncation {i}, lambda {l:e}")
            });
        }
    }
    vec![expansion.res, bound.res, residual.res]
}

fn suite_duality(cfg: &VerifyConfig, truncs: &[Truncation]) -> SuiteResult {
    let mut s = Suite::new("zeros_and_interlacing", 1e-8, cfg);
    for (i, t) in truncs.iter().enumerate() {
        let spec = match CoefficientSpec::tabulated(&t.offdiag_with_edge(), &t.diag) {
            Ok(spec) => spec,
            Err(e) => {
                s.error(e);
                continue;
            }
        };
        let n = t.len();
        match (eigenvalues(t, 1e-13), zeros_by_sign_changes(&spec, n, 1e-13)) {
            (Ok(ev), Ok(z)) => {
                let scale = 1.0 + t.norm_inf();
                for (x, y) in ev.iter().zip(&z) {
                    s.check((x - y).abs() < s.tol * scale, || {
                        format!("truncation {i}: eigenvalue {x:e} vs zero {y:e}")
                    });
                }
            }
            (Err(e), _) | (_, Err(e)) => s.error(e),
        }
        if n > 1 {
            match interlacing_check(&spec, n - 1, 1e-13) {
                Ok(ok) => s.check(ok, || format!("truncation {i}: interlacing fails at N = {}", n - 1)),
                Err(e) => s.error(e),
            }
        }
    }
    s.res
}

fn suite_christoffel_darboux(cfg: &VerifyConfig, specs: &[CoefficientSpec]) -> SuiteResult {
    let mut s = Suite::new("christoffel_darboux", 1e-9, cfg);
    for (i, spec) in specs.iter().enumerate() {
        match cd_sweep(spec, 1000, s.tol) {
            Ok(first) => {
                s.check(first.is_none() && s.tol > 0.0, || format!("spec {i}: identity fails at n = {first:?}"))
            }
            Err(e) => s.error(e),
        }
    }
    s.res
}

fn suite_resolvent(cfg: &VerifyConfig, specs: &[CoefficientSpec], rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("approximant_resolvent", 1e-10, cfg);
    for (i, spec) in specs.iter().enumerate() {
        let t = match truncate(spec, 200) {
            Ok(t) => t,
            Err(e) => {
                s.error(e);
                continue;
            }
        };
        for _ in 0..10 {
            let lambda = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(0.5..5.0));
            for n in [1, 2, 5, 17, 60, 200] {
                let sub = Truncation { diag: t.diag[..n].to_vec(), offdiag: t.offdiag[..n - 1].to_vec(), edge: t.a(n) };
                match relative_deviation(approximant_of(&sub, lambda), resolvent_11(&sub, lambda)) {
                    Some(d) => {
                        s.res.max_deviation = s.res.max_deviation.max(d);
                        s.check(d < s.tol, || format!("spec {i}: N={n}, lambda={lambda}: deviation {d:e}"))
                    }
                    None => s.check(false, || format!("spec {i}: N={n}, lambda={lambda}: unexpected pole")),
                }
            }
        }
    }
    s.res
}

impl Truncation {
    /// `a_1..a_N`.
    fn offdiag_with_edge(&self) -> Vec<f64> {
        let mut a = self.offdiag.clone();
        a.push(self.edge);
        a
    }
}

/// Runs every suite; the report passes only when all suites pass.
pub fn run_suites(cfg: &VerifyConfig) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let specs: Vec<CoefficientSpec> = (0..cfg.specs).map(|_| random_spec(&mut rng)).collect();
    let truncs: Vec<Truncation> = (0..cfg.truncations)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            let mut t = random_truncation(&mut rng, n);
            if cfg.corrupt_offdiag_sign && n > 1 {
                let k = rng.gen_range(0..n - 1);
                t.offdiag[k] = -t.offdiag[k];
            }
            t
        })
        .collect();
    let mut suites = vec![suite_multiindex(cfg), suite_formulas(cfg, &specs)];
    suites.extend(suites_last_coordinate(cfg, &truncs));
    suites.push(suite_duality(cfg, &truncs));
    suites.push(suite_christoffel_darboux(cfg, &specs));
    suites.push(suite_resolvent(cfg, &specs, &mut rng));
    VerifyReport { passed: suites.iter().all(|s| s.passed), suites }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { truncations: 40, specs: 4, ..VerifyConfig::default() }
    }

    #[test]
    fn default_suites_pass() {
        let r = run_suites(&small());
        for s in &r.suites {
            assert!(s.passed, "{}: {:?}", s.name, s.failures);
        }
    }

    #[test]
    fn zero_tolerance_fails() {
        let r = run_suites(&VerifyConfig { tolerance: 0.0, ..small() });
        assert!(!r.passed);
    }

    #[test]
    fn corrupted_sign_is_caught() {
        let r = run_suites(&VerifyConfig { corrupt_offdiag_sign: true, ..small() });
        assert!(!r.passed);
        let failing: Vec<&str> = r.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        assert!(failing.contains(&"delta_bound"), "{failing:?}");
    }
}
