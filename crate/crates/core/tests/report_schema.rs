use std::collections::BTreeMap;

use jacobi::cli::CriteriaReport;
use jacobi::conditions::{run_battery, NumericRange};
use jacobi::presets;
use jacobi::verify::random_spec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schema/criteria.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn report(spec: &jacobi::coeffseq::CoefficientSpec, m_max: usize) -> Value {
    let battery = run_battery(spec, m_max, &NumericRange::default()).unwrap();
    serde_json::to_value(CriteriaReport { operator: spec.to_document(), m_max, battery: &battery }).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{what}: {errors:#?}");
}

#[test]
fn preset_reports_match_the_schema() {
    let v = validator();
    for p in presets::PRESETS {
        let spec = presets::build(p.name, &BTreeMap::new()).unwrap();
        assert_valid(&v, &report(&spec, 6), p.name);
    }
}

#[test]
fn numeric_mode_reports_match_the_schema() {
    let v = validator();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..6 {
        let spec = random_spec(&mut rng);
        assert_valid(&v, &report(&spec, 3), &format!("random spec {i}"));
    }
    let a: Vec<f64> = (1..=3000).map(|n| (n as f64).sqrt()).collect();
    let tab = jacobi::coeffseq::CoefficientSpec::tabulated(&a, &vec![1.0; 3000]).unwrap();
    assert_valid(&v, &report(&tab, 2), "tabulated");
}

#[test]
fn malformed_reports_are_rejected() {
    let v = validator();
    let good = report(&presets::free().unwrap(), 2);
    let mut bad = good.clone();
    bad["verdicts"][0]["outcome"] = Value::from("Maybe");
    assert!(!v.is_valid(&bad));
    let mut bad = good.clone();
    bad["verdicts"][0].as_object_mut().unwrap().remove("m");
    assert!(!v.is_valid(&bad));
    let mut bad = good;
    bad["conclusion"] = Value::from("SELF-ADJOINT");
    assert!(!v.is_valid(&bad));
}
