//! Acceptance criteria, one PASS/FAIL line each. Tolerances and runtime
//! budgets are pinned as constants below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use jacobi::cfrac::{approximant_of, convergence_scan, relative_deviation, resolvent_11};
use jacobi::coeffseq::CoefficientSpec;
use jacobi::conditions::{
    check_bm, check_carleman, check_cm, check_cojuhari_janas, check_dennis_wall, check_dm, check_janas_naboko, g_full,
    g_plus_times_a, g_tilde, NumericRange, Outcome,
};
use jacobi::multiindex::{self, Variant};
use jacobi::orthopoly::{cd_sweep, zeros_by_sign_changes};
use jacobi::spectra::{
    delta_expansion, eigenvalues, eigenvector, embedded_residual_sq, f_bound, interlacing, limit_points,
    residual_split, truncate, Truncation,
};
use jacobi::verify::{hand_g_full, hand_g_plus_times_a, hand_g_tilde, random_spec, random_truncation};
use jacobi::{presets, Error, Exponent};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;
const FORMULA_RTOL: f64 = 1e-12;
const EXPANSION_RTOL: f64 = 1e-10;
const RESIDUAL_RTOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-8;
const CD_RTOL: f64 = 1e-9;
const RESOLVENT_RTOL: f64 = 1e-10;
const CF_TAIL_TOL: f64 = 1e-8;
const GENCOND_DROP: f64 = 10.0;

struct Check {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Check {
    Check { ok, detail: detail.into() }
}

fn rel(x: f64, y: f64) -> f64 {
    let s = x.abs().max(y.abs());
    if s == 0.0 {
        0.0
    } else {
        (x - y).abs() / s
    }
}

/// False for NaN deviations.
fn within(d: f64, tol: f64) -> bool {
    d <= tol
}

fn q(s: &str) -> Exponent {
    presets::parse_rational(s).unwrap()
}

fn truncations() -> Vec<Truncation> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            random_truncation(&mut rng, n)
        })
        .collect()
}

fn specs(count: usize, seed: u64) -> Vec<CoefficientSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_spec(&mut rng)).collect()
}

fn c1_multiindex() -> Check {
    let expected: [&[&str]; 4] = [
        &["(0|1)"],
        &["(0,1|1,1)", "(0,1|1,2)"],
        &["(0,1,0|1,1,1)", "(0,1,2|1,2,2)", "(0,1,2|1,2,3)"],
        &[
            "(0,1,0,1|1,1,1,1)",
            "(0,1,0,1|1,1,1,2)",
            "(0,1,2,1|1,2,2,1)",
            "(0,1,2,1|1,2,2,2)",
            "(0,1,2,3|1,2,3,3)",
            "(0,1,2,3|1,2,3,4)",
        ],
    ];
    for (m, want) in (1..=4).zip(expected) {
        let got: Vec<String> =
            multiindex::generate(Variant::IPlus, m).unwrap().iter().map(ToString::to_string).collect();
        if got != want {
            return outcome(false, format!("I_{m}+ = {got:?}"));
        }
    }
    outcome(true, "cardinalities 1, 2, 3, 6, exact match")
}

fn c2_formulas() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (i, spec) in specs(1000, SEED).iter().enumerate() {
        for m in 1..=4usize {
            for n in (m as u64 + 2)..=50 {
                let mut pairs = vec![(g_plus_times_a(spec, m, n), hand_g_plus_times_a(spec, m, n))];
                if m <= 2 {
                    pairs.push((g_full(spec, m, n), hand_g_full(spec, m, n)));
                    pairs.push((g_tilde(spec, m, n), hand_g_tilde(spec, m, n)));
                }
                for (x, y) in pairs {
                    let d = rel(x.unwrap(), y.unwrap());
                    count += 1;
                    worst = worst.max(d);
                    if !within(d, FORMULA_RTOL) {
                        return outcome(false, format!("spec {i}, m={m}, n={n}: relative deviation {d:e}"));
                    }
                }
            }
        }
    }
    outcome(true, format!("{count} comparisons, max relative deviation {worst:.1e} (tol {FORMULA_RTOL:e})"))
}

/// Criteria 3, 4 and 5 share one sweep.
fn c345_last_coordinate() -> [Check; 3] {
    let (mut worst_e, mut worst_r) = (0.0f64, 0.0f64);
    let (mut checked, mut skipped, mut violations, mut pairs) = (0usize, 0usize, 0usize, 0usize);
    let mut first_bad_e = None;
    let mut first_bad_r = None;
    for (i, t) in truncations().iter().enumerate() {
        for l in eigenvalues(t, 1e-14).unwrap() {
            let pair = eigenvector(t, l).unwrap();
            pairs += 1;
            for m in 1..=t.len().min(5) {
                match delta_expansion(t, &pair, m) {
                    Ok(d) => {
                        checked += 1;
                        let dev = rel(d, pair.last_coord);
                        worst_e = worst_e.max(dev);
                        if !within(dev, EXPANSION_RTOL) && first_bad_e.is_none() {
                            first_bad_e = Some(format!("truncation {i}, lambda {l:e}, m={m}: {dev:e}"));
                        }
                    }
                    Err(Error::DegeneratePivot { .. }) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                }
                if pair.last_coord.abs() > f_bound(t, l, m).unwrap() {
                    violations += 1;
                }
            }
            let target = l + 0.37;
            let dev = rel(residual_split(t, &pair, target).total, embedded_residual_sq(t, &pair, target));
            worst_r = worst_r.max(dev);
            if !within(dev, RESIDUAL_RTOL) && first_bad_r.is_none() {
                first_bad_r = Some(format!("truncation {i}, lambda {l:e}: {dev:e}"));
            }
        }
    }
    [
        match first_bad_e {
            None => outcome(
                true,
                format!("{checked} cases, {skipped} degenerate pivots skipped, max relative deviation {worst_e:.1e} (tol {EXPANSION_RTOL:e})"),
            ),
            Some(s) => outcome(false, s),
        },
        outcome(violations == 0, format!("{violations} violations of |delta_N| <= F over {checked} cases")),
        match first_bad_r {
            None => outcome(true, format!("{pairs} eigenpairs, max relative deviation {worst_r:.1e} (tol {RESIDUAL_RTOL:e})")),
            Some(s) => outcome(false, s),
        },
    ]
}

fn c6_duality() -> Check {
    let mut worst = 0.0f64;
    let (mut resolved, mut certified) = (0usize, 0usize);
    for (i, spec) in specs(20, SEED + 6).iter().enumerate() {
        for n in 1..=100 {
            let t = truncate(spec, n).unwrap();
            let ev = eigenvalues(&t, 1e-13).unwrap();
            let zeros = zeros_by_sign_changes(spec, n, 1e-13).unwrap();
            let scale = 1.0 + t.norm_inf();
            for (x, z) in ev.iter().zip(&zeros) {
                let d = (x - z).abs() / scale;
                worst = worst.max(d);
                if !within(d, ZERO_TOL) {
                    return outcome(false, format!("spec {i}, N={n}: eigenvalue {x:e} vs zero {z:e}"));
                }
            }
            let il = interlacing(spec, n, 1e-13).unwrap();
            if !il.holds() {
                return outcome(false, format!("spec {i}, N={n}: interlacing violated at {:?}", il.violations));
            }
            resolved += il.resolved;
            certified += il.certified;
        }
    }
    outcome(
        true,
        format!(
            "max |eigenvalue - zero|/(1+||T||) = {worst:.1e} (tol {ZERO_TOL:e}); strict interlacing with {resolved} gaps resolved, {certified} certified"
        ),
    )
}

fn c7_christoffel_darboux() -> Check {
    for (i, spec) in specs(20, SEED + 7).iter().enumerate() {
        if let Some(n) = cd_sweep(spec, 1000, CD_RTOL).unwrap() {
            return outcome(false, format!("spec {i}: first failure at n = {n}"));
        }
    }
    outcome(true, format!("20 specs, n <= 1000, relative tol {CD_RTOL:e}"))
}

fn c8_resolvent() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut worst = 0.0f64;
    for (i, spec) in specs(20, SEED + 8).iter().enumerate() {
        let t = truncate(spec, 200).unwrap();
        for _ in 0..50 {
            let lambda = Complex64::new(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(0.5..5.0) * if rng.gen() { 1.0 } else { -1.0 },
            );
            for n in 1..=200 {
                let sub = Truncation { diag: t.diag[..n].to_vec(), offdiag: t.offdiag[..n - 1].to_vec(), edge: t.a(n) };
                let Some(d) = relative_deviation(approximant_of(&sub, lambda), resolvent_11(&sub, lambda)) else {
                    return outcome(false, format!("spec {i}, N={n}: pole at {lambda}"));
                };
                worst = worst.max(d);
                if !within(d, RESOLVENT_RTOL) {
                    return outcome(false, format!("spec {i}, N={n}, lambda={lambda}: {d:e}"));
                }
            }
        }
    }
    outcome(
        true,
        format!("20 specs x 50 lambda x N <= 200, max relative deviation {worst:.1e} (tol {RESOLVENT_RTOL:e})"),
    )
}

fn expect(bad: &mut Vec<String>, label: String, got: Outcome, want: Outcome) {
    if got != want {
        bad.push(format!("{label}: {got:?}, expected {want:?}"));
    }
}

fn c9_examples() -> Check {
    let r = NumericRange::default();
    let mut bad = Vec::new();
    let hf = |holds: bool| if holds { Outcome::Holds } else { Outcome::Fails };

    let b1 = presets::ex_b1(q("2")).unwrap();
    let b2 = presets::ex_b2(q("3")).unwrap();
    let c1 = presets::ex_c1(q("3")).unwrap();
    let c2 = presets::ex_c2(q("4")).unwrap();
    for m in 1..=6 {
        expect(&mut bad, format!("ex-B1 B_{m}"), check_bm(&b1, m, &r).unwrap().outcome, hf(m >= 3));
        expect(&mut bad, format!("ex-B2 B_{m}"), check_bm(&b2, m, &r).unwrap().outcome, hf(m < 3));
        expect(&mut bad, format!("ex-C1 C_{m}"), check_cm(&c1, m, &r).unwrap().outcome, hf(m >= 2));
        expect(&mut bad, format!("ex-C2 C_{m}"), check_cm(&c2, m, &r).unwrap().outcome, hf(m <= 3));
    }
    let d = presets::ex_d(2).unwrap();
    expect(&mut bad, "ex-D D_1".into(), check_dm(&d, 1, &r).unwrap().outcome, Outcome::Fails);
    expect(&mut bad, "ex-D D_2".into(), check_dm(&d, 2, &r).unwrap().outcome, Outcome::Holds);
    expect(&mut bad, "ex-D CAR".into(), check_carleman(&d, &r).outcome, Outcome::Fails);
    expect(&mut bad, "ex-D DW".into(), check_dennis_wall(&d, &r).outcome, Outcome::Fails);
    expect(&mut bad, "ex-D JN".into(), check_janas_naboko(&d, &r).outcome, Outcome::Fails);
    expect(&mut bad, "ex-D CJ".into(), check_cojuhari_janas(&d, &r).outcome, Outcome::Fails);

    let comp = |alpha: &str| presets::ex_b_comp(q(alpha), q("4"), q("5")).unwrap();
    for alpha in ["2", "3", "13/4", "7/2", "4", "17/4", "9/2", "5"] {
        let a = q(alpha);
        let spec = comp(alpha);
        expect(&mut bad, format!("ex-B-comp alpha={alpha} JN"), check_janas_naboko(&spec, &r).outcome, hf(a < q("4")));
        expect(&mut bad, format!("ex-B-comp alpha={alpha} DW"), check_dennis_wall(&spec, &r).outcome, hf(a <= q("3")));
    }
    expect(&mut bad, "ex-B-comp alpha=3 B_3".into(), check_bm(&comp("3"), 3, &r).unwrap().outcome, Outcome::Holds);
    // Even m holds exactly when 2(m+1)α < m(β+γ); at α = 4 equality at
    // m = 8 leaves it failing and m = 10 is the first even depth.
    let first_holding = |alpha: &str, cap: usize| {
        let spec = comp(alpha);
        (1..=cap).find(|&m| check_bm(&spec, m, &r).unwrap().outcome == Outcome::Holds)
    };
    let at4 = first_holding("4", 12);
    if at4 != Some(10) {
        bad.push(format!("ex-B-comp alpha=4: first B_m holding at {at4:?}, expected Some(10)"));
    }
    expect(&mut bad, "ex-B-comp alpha=4 B_8".into(), check_bm(&comp("4"), 8, &r).unwrap().outcome, Outcome::Fails);
    let at17 = first_holding("17/4", 18);
    if at17 != Some(18) {
        bad.push(format!("ex-B-comp alpha=17/4: first B_m holding at {at17:?}, expected Some(18)"));
    }
    let at92 = first_holding("9/2", 12);
    if at92.is_some() {
        bad.push(format!("ex-B-comp alpha=9/2: B_m holds at {at92:?}"));
    }
    if bad.is_empty() {
        outcome(true, "all symbolic verdicts exact; ex-B-comp B_m first holds at m=10 (alpha=4), m=18 (alpha=17/4)")
    } else {
        outcome(false, bad.join("; "))
    }
}

fn c11_scans() -> Check {
    let spec = presets::ex_b1(q("2")).unwrap();
    let report = limit_points(&spec, &[100, 200, 400], (0.0, 50.0), 1e-3, 1e-12).unwrap();
    if report.candidates.is_empty() {
        return outcome(false, "no limit-point candidates in [0, 50]");
    }
    let drop = GENCOND_DROP.log10();
    for c in &report.candidates {
        let logs: Vec<f64> = c.gencond_track.iter().map(|p| p.log10_a_n_delta_n).collect();
        let monotone = logs.windows(2).all(|w| w[1] < w[0]);
        if !monotone || logs[0] - logs[logs.len() - 1] < drop {
            return outcome(false, format!("candidate {}: log10 track {logs:?}", c.location));
        }
    }
    let scan = convergence_scan(&spec, &[Complex64::new(2.0, 3.0)], 200, CF_TAIL_TOL, 1e-12).unwrap();
    let e = &scan[0];
    let tail_ok = e.tail_deviation.is_some_and(|d| d < CF_TAIL_TOL);
    if !(e.converged && tail_ok) {
        return outcome(false, format!("cfrac at 2+3i: converged {}, tail {:?}", e.converged, e.tail_deviation));
    }
    let locs: Vec<String> = report.candidates.iter().map(|c| format!("{:.6}", c.location)).collect();
    outcome(
        true,
        format!(
            "candidates [{}] with a_N|delta_N| falling >= {GENCOND_DROP}x; K_N(2+3i) tail deviation {:e} < {CF_TAIL_TOL:e}",
            locs.join(", "),
            e.tail_deviation.unwrap()
        ),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn main() -> ExitCode {
    let mut lines: Vec<(u32, &str, Check, Duration, Duration)> = Vec::new();
    let push = |lines: &mut Vec<_>, id, name, (o, t): (Check, Duration), budget: u64| {
        lines.push((id, name, o, t, Duration::from_secs(budget)))
    };

    push(&mut lines, 1, "multi-index fidelity", timed(c1_multiindex), 1);
    push(&mut lines, 2, "formula equivalence", timed(c2_formulas), 10);
    let ([e3, e4, e5], t) = timed(c345_last_coordinate);
    push(&mut lines, 3, "last-coordinate expansion", (e3, t), 30);
    push(&mut lines, 4, "last-coordinate bound", (e4, t), 30);
    push(&mut lines, 5, "residual identity", (e5, t), 10);
    push(&mut lines, 6, "eigen/zero duality and interlacing", timed(c6_duality), 60);
    push(&mut lines, 7, "Christoffel-Darboux", timed(c7_christoffel_darboux), 10);
    push(&mut lines, 8, "approximant-resolvent", timed(c8_resolvent), 60);
    push(&mut lines, 9, "example verdicts", timed(c9_examples), 5);
    let covered = lines.iter().filter(|l| (3..=8).contains(&l.0)).all(|l| l.2.ok);
    let (c11, t11) = timed(c11_scans);
    let c10 =
        outcome(covered && c11.ok, "infinite-dimensional claims not checked directly; covered by criteria 3-8 and 11");
    push(&mut lines, 10, "infinite-dimensional claims", (c10, Duration::ZERO), 1);
    push(&mut lines, 11, "qualitative scans", (c11, t11), 120);

    let mut all = true;
    for (id, name, o, t, budget) in &lines {
        let ok = o.ok && t <= budget;
        all &= ok;
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {id:>2} {name}: {} [{:.2}s, budget {}s]",
            o.detail,
            t.as_secs_f64(),
            budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
