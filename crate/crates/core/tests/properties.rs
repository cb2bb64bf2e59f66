//! Invariants checked on generated inputs.

use jacobi::cfrac::{approximant_of, relative_deviation, resolvent_11};
use jacobi::coeffseq::{Branch, BranchRule, CoefficientSpec, SequenceRule, Sign, Which};
use jacobi::conditions::{g_full, g_plus_times_a, g_tilde};
use jacobi::multiindex::{self, Variant};
use jacobi::orthopoly::cd_sweep;
use jacobi::spectra::{
    delta_expansion, eigenvalue_count, eigenvalues, eigenvector, embedded_residual_sq, f_bound, interlacing,
    residual_split, Truncation,
};
use jacobi::verify::{hand_g_full, hand_g_plus_times_a, hand_g_tilde};
use jacobi::{Error, Exponent};
use num_complex::Complex64;
use proptest::prelude::*;

fn truncation() -> impl Strategy<Value = Truncation> {
    (1usize..=12).prop_flat_map(|n| {
        (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(0.1f64..3.0, n)).prop_map(|(b, a)| {
            let edge = a[a.len() - 1];
            Truncation::new(b, a[..a.len() - 1].to_vec(), edge).unwrap()
        })
    })
}

fn exponent() -> impl Strategy<Value = Exponent> {
    (1i64..=3).prop_flat_map(|den| (-2 * den..=2 * den).prop_map(move |num| Exponent::new(num, den)))
}

fn branch(signed: bool) -> impl Strategy<Value = Branch> {
    (0.5f64..2.0, exponent(), any::<bool>()).prop_map(move |(c, e, neg)| {
        let sign = if signed && neg { Sign::Negative } else { Sign::Positive };
        Branch::signed(c, e, sign).unwrap()
    })
}

fn spec() -> impl Strategy<Value = CoefficientSpec> {
    (1usize..=2).prop_flat_map(|q| {
        (prop::collection::vec(branch(false), q), prop::collection::vec(branch(true), q)).prop_map(|(a, b)| {
            CoefficientSpec::new(
                SequenceRule::Branches(BranchRule::periodic(a).unwrap()),
                SequenceRule::Branches(BranchRule::periodic(b).unwrap()),
            )
            .unwrap()
        })
    })
}

fn close(x: f64, y: f64, rtol: f64) -> bool {
    (x - y).abs() <= rtol * x.abs().max(y.abs())
}

fn tabulated(t: &Truncation) -> CoefficientSpec {
    let mut a = t.offdiag.clone();
    a.push(t.edge);
    CoefficientSpec::tabulated(&a, &t.diag).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn plus_sets_are_sorted_and_constrained(m in 1usize..=10) {
        for v in [Variant::I, Variant::IHat, Variant::IPlus, Variant::IHatPlus] {
            let set = multiindex::generate(v, m).unwrap();
            prop_assert_eq!(set.len() as u64, multiindex::cardinality(v, m).unwrap());
            prop_assert!(set.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(set.iter().all(multiindex::satisfies_constraints));
        }
        prop_assert_eq!(multiindex::cardinality(Variant::I, m).unwrap(), 1u64 << m);
    }

    #[test]
    fn sturm_count_matches_the_spectrum(t in truncation(), x in -12.0f64..12.0) {
        let ev = eigenvalues(&t, 1e-14).unwrap();
        prop_assert_eq!(ev.len(), t.len());
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let below = ev.iter().filter(|l| **l < x).count();
        let near = ev.iter().any(|l| (l - x).abs() < 1e-9);
        if !near {
            prop_assert_eq!(eigenvalue_count(&t, x), below);
        }
        let trace: f64 = t.diag.iter().sum();
        let sum: f64 = ev.iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-10 * (1.0 + t.norm_inf() * t.len() as f64));
    }

    #[test]
    fn last_coordinate_expansion_and_bound(t in truncation()) {
        for l in eigenvalues(&t, 1e-14).unwrap() {
            let pair = eigenvector(&t, l).unwrap();
            for m in 1..=t.len().min(5) {
                match delta_expansion(&t, &pair, m) {
                    Ok(d) => {
                        prop_assert!(close(d, pair.last_coord, 1e-10), "m={} {} vs {}", m, d, pair.last_coord);
                        prop_assert!(pair.last_coord.abs() <= f_bound(&t, l, m).unwrap());
                    }
                    Err(Error::DegeneratePivot { .. }) => {}
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
        }
    }

    #[test]
    fn residual_splits_into_two_squares(t in truncation(), shift in -3.0f64..3.0) {
        for l in eigenvalues(&t, 1e-14).unwrap() {
            let pair = eigenvector(&t, l).unwrap();
            let split = residual_split(&t, &pair, l + shift);
            prop_assert!(close(split.total, split.term1 + split.term2, 1e-15));
            prop_assert!(close(split.total, embedded_residual_sq(&t, &pair, l + shift), 1e-10) || split.total < 1e-28);
        }
    }

    #[test]
    fn truncation_spectra_interlace(t in truncation()) {
        prop_assume!(t.len() > 1);
        let il = interlacing(&tabulated(&t), t.len() - 1, 1e-13).unwrap();
        prop_assert!(il.holds(), "{:?}", il);
    }

    #[test]
    fn approximant_is_the_resolvent_entry(t in truncation(), re in -8.0f64..8.0, im in 0.2f64..4.0) {
        for lambda in [Complex64::new(re, im), Complex64::new(re, -im)] {
            let d = relative_deviation(approximant_of(&t, lambda), resolvent_11(&t, lambda)).unwrap();
            prop_assert!(d <= 1e-10);
        }
        let k = approximant_of(&t, Complex64::new(re, im)).finite().unwrap();
        let kc = approximant_of(&t, Complex64::new(re, -im)).finite().unwrap();
        prop_assert!((k.conj() - kc).norm() <= 1e-12 * k.norm());
        prop_assert!(k.im < 0.0);
    }

    #[test]
    fn multiindex_sums_match_hand_formulas(s in spec(), n in 6u64..40) {
        for m in 1..=4 {
            prop_assert!(close(g_plus_times_a(&s, m, n).unwrap(), hand_g_plus_times_a(&s, m, n).unwrap(), 1e-12));
        }
        for m in 1..=2 {
            prop_assert!(close(g_full(&s, m, n).unwrap(), hand_g_full(&s, m, n).unwrap(), 1e-12));
            prop_assert!(close(g_tilde(&s, m, n).unwrap(), hand_g_tilde(&s, m, n).unwrap(), 1e-12));
        }
    }

    #[test]
    fn christoffel_darboux_holds(s in spec()) {
        prop_assert_eq!(cd_sweep(&s, 300, 1e-9).unwrap(), None);
    }

    #[test]
    fn documents_round_trip(s in spec()) {
        let json = serde_json::to_string(&s.to_document()).unwrap();
        let back = CoefficientSpec::from_json(&json).unwrap();
        prop_assert_eq!(&back, &s);
        for n in 1..20 {
            prop_assert_eq!(back.eval_a(n).unwrap(), s.eval_a(n).unwrap());
        }
    }

    #[test]
    fn power_families_report_their_exponents(c in 0.5f64..2.0, ea in exponent(), eb in exponent()) {
        let s = CoefficientSpec::power(c, ea, c, eb).unwrap();
        prop_assert_eq!(s.asymptotic_exponent(Which::A, 0), Some(ea));
        prop_assert_eq!(s.asymptotic_exponent(Which::B, 0), Some(eb));
    }
}
