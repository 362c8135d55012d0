use serde_json::{json, Value};

use robsyn::io::document::{parse_document, parse_document_unvalidated};
use robsyn::model::{validate_automaton, Violation};

fn running() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/running.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn violations(doc: &Value) -> Vec<Violation> {
    let a = parse_document_unvalidated(&doc.to_string()).expect("well formed");
    validate_automaton(&a).violations
}

#[test]
fn running_example_loads_with_warnings_only() {
    let v = violations(&running());
    assert!(!v.is_empty());
    assert!(v.iter().all(Violation::is_warning));
    assert!(parse_document(&running().to_string()).is_ok());
}

#[test]
fn zero_distance_between_distinct_states() {
    let mut doc = running();
    doc["metric"]["matrix"][0][1] = json!("0");
    doc["metric"]["matrix"][1][0] = json!("0");
    assert!(violations(&doc).contains(&Violation::Indiscernible(0, 1)));
    assert!(parse_document(&doc.to_string()).is_err());
}

#[test]
fn asymmetric_table() {
    let mut doc = running();
    doc["metric"]["matrix"][0][1] = json!("2");
    assert!(violations(&doc).iter().any(|v| matches!(v, Violation::Asymmetric(..))));
}

#[test]
fn explicit_successor_beyond_gamma() {
    let mut doc = running();
    // q0 and q6 are 5 apart, γ = 1.
    let t = doc["transitions"].as_array_mut().unwrap().iter_mut().find(|t| t["from"] == "q0").unwrap();
    let nominal = t["nominal"].clone();
    t["disturbed"] = json!([nominal, "q6"]);
    let v = violations(&doc);
    assert!(v.iter().any(|v| matches!(v, Violation::GammaBound { from: 0, target: 6, .. })), "{v:?}");
    assert!(parse_document(&doc.to_string()).is_err());
}
