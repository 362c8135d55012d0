//! Machine-readable JSON reports.

use serde_json::{json, Map, Value};

use crate::certificates::{CertReport, SigmaBound};
use crate::fault::{FaultBound, SearchOutcome, SimRun};
use crate::io::formats::strategy_to_doc;
use crate::model::{MetricAutomaton, StateId};
use crate::num::{format_rat, ExtNonNeg};
use crate::robustness::{OptTable, RobustnessReport};

fn names(a: &MetricAutomaton, v: &[StateId]) -> Value {
    Value::from(v.iter().map(|&q| a.name(q).to_string()).collect::<Vec<_>>())
}

fn ext(x: &ExtNonNeg) -> Value {
    Value::from(x.to_string())
}

fn per_state<F: Fn(StateId) -> Value>(a: &MetricAutomaton, f: F) -> Value {
    let mut m = Map::new();
    for q in 0..a.len() {
        m.insert(a.name(q).to_string(), f(q));
    }
    Value::Object(m)
}

fn opt_json(a: &MetricAutomaton, t: &OptTable) -> Value {
    match t {
        OptTable::Scalar(v) => per_state(a, |q| ext(&v[q])),
        OptTable::Matrix(cols) => per_state(a, |q| Value::from(cols.iter().map(|c| ext(&c[q])).collect::<Vec<_>>())),
        OptTable::Parity(rows) => per_state(a, |q| Value::from(rows[q].iter().map(ext).collect::<Vec<_>>())),
    }
}

pub fn robustness_json(a: &MetricAutomaton, r: &RobustnessReport) -> Value {
    let mut v = json!({
        "objective": r.objective,
        "sigma": ext(&r.sigma),
        "sigma_min": ext(r.sigma_min_components.as_ref().unwrap_or(&r.sigma)),
        "guaranteed_distance": ext(&r.raw),
        "gamma_bar": format_rat(&r.gamma_bar),
        "exact_win": r.exact_win,
        "certified": r.certified,
        "inflated": r.inflated.iter().map(|s| names(a, s)).collect::<Vec<_>>(),
        "opt": opt_json(a, &r.opt),
        "iterations": r.iterations,
    });
    let m = v.as_object_mut().expect("object");
    if let Some(s) = &r.strategy_sigma {
        m.insert("strategy_sigma".into(), ext(s));
    }
    if let Some(s) = &r.strategy {
        m.insert("strategy".into(), serde_json::to_value(strategy_to_doc(a, s)).expect("strategy"));
    }
    if !r.notes.is_empty() {
        m.insert("notes".into(), Value::from(r.notes.clone()));
    }
    v
}

pub fn certificate_json(a: &MetricAutomaton, check: &CertReport, bound: Option<&SigmaBound>) -> Value {
    let mut v = json!({
        "valid": check.is_valid(),
        "violations": check.violations.iter().map(|x| x.describe(a)).collect::<Vec<_>>(),
    });
    if let Some(b) = bound {
        let m = v.as_object_mut().expect("object");
        m.insert("lipschitz".into(), ext(&b.lipschitz.k));
        if let Some((p, q, k)) = b.lipschitz.witness {
            m.insert("lipschitz_witness".into(), json!({"pair": [a.name(p), a.name(q)], "component": k}));
        }
        m.insert("sigma_bound".into(), ext(&b.sigma));
        m.insert("certified".into(), Value::from(b.certified));
    }
    v
}

pub fn fault_bound_json(a: &MetricAutomaton, b: &FaultBound) -> Value {
    json!({
        "n": b.n.map_or(Value::from("inf"), Value::from),
        "sigma": ext(&b.sigma),
        "pedigree": b.pedigree,
        "certified": b.certified,
        "lengths": b.lengths.iter().map(|t| json!({
            "set": t.set,
            "state": a.name(t.state),
            "length": t.length.map_or(Value::from("inf"), Value::from),
        })).collect::<Vec<_>>(),
    })
}

pub fn search_json(a: &MetricAutomaton, s: &SearchOutcome) -> Value {
    json!({
        "n_bound": s.n_bound,
        "explored": s.explored,
        "verdict": if s.violation.is_some() { "violation" } else { "no-violation-found" },
        "witness": s.violation.as_ref().map(|w| Value::from(w.describe(a))),
    })
}

pub fn simulation_json(a: &MetricAutomaton, r: &SimRun) -> Value {
    json!({
        "trace": names(a, &r.trace),
        "faults": r.faults,
        "limit_cycle": names(a, &r.limit_cycle),
        "accepted": r.accepted,
        "seed": r.seed,
    })
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}
