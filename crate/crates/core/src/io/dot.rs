//! Graphviz export. Nominal edges are solid (merged per state pair and labelled with
//! their inputs), disturbance-only successors dashed, strategy edges bold.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{InputId, MetricAutomaton, StateId, Strategy};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn chosen(s: Option<&Strategy>, q: StateId, x: InputId) -> bool {
    match s {
        None => false,
        Some(Strategy::Memoryless(c)) => c[q].contains(&x),
        Some(Strategy::Indexed(c)) => c[q].iter().any(|v| v.contains(&x)),
    }
}

/// `notes[q]`, when given, is appended to the node label (e.g. opt values or ranks).
pub fn export_dot(a: &MetricAutomaton, strategy: Option<&Strategy>, notes: Option<&[String]>) -> String {
    let targets: Vec<StateId> = a.acceptance.sets().into_iter().flatten().copied().collect();
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  __init [shape=point];\n");
    for q in 0..a.len() {
        let mut label = a.name(q).to_string();
        if let Some(n) = notes.and_then(|n| n.get(q)) {
            if !n.is_empty() {
                label = format!("{label}\\n{n}");
            }
        }
        let shape = if targets.contains(&q) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [label={}, shape={shape}];", quote(a.name(q)), quote(&label));
    }
    let _ = writeln!(out, "  __init -> {};", quote(a.name(a.initial)));
    for q in 0..a.len() {
        let mut nominal: BTreeMap<StateId, Vec<InputId>> = BTreeMap::new();
        for x in a.enabled(q) {
            nominal.entry(a.nominal(q, x).expect("enabled")).or_default().push(x);
        }
        for (&p, xs) in &nominal {
            let label = xs.iter().map(|&x| a.inputs[x].as_str()).collect::<Vec<_>>().join(",");
            let bold = xs.iter().any(|&x| chosen(strategy, q, x));
            let style = if bold { ", penwidth=2, color=blue" } else { "" };
            let _ = writeln!(out, "  {} -> {} [label={}{style}];", quote(a.name(q)), quote(a.name(p)), quote(&label));
        }
        let mut extra: Vec<StateId> = a
            .enabled(q)
            .into_iter()
            .flat_map(|x| a.post_input(q, x).to_vec())
            .filter(|p| !nominal.contains_key(p))
            .collect();
        extra.sort_unstable();
        extra.dedup();
        for p in extra {
            let _ = writeln!(out, "  {} -> {} [style=dashed, color=gray];", quote(a.name(q)), quote(a.name(p)));
        }
    }
    out.push_str("}\n");
    out
}
