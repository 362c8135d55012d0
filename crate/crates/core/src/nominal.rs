//! Nominal-winning checks: every disturbance-free outcome must satisfy the objective.

use crate::error::Witness;
use crate::graph::{bfs, lasso_within, path_to};
use crate::model::{Allowed, MetricAutomaton, StateId};

pub fn nominal_successors(a: &MetricAutomaton, allowed: &Allowed, q: StateId) -> Vec<StateId> {
    let mut v: Vec<StateId> = allowed[q].iter().filter_map(|&x| a.nominal(q, x)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Finds a nominal outcome from `start` that never reaches `targets`.
pub fn reach_violation(a: &MetricAutomaton, allowed: &Allowed, targets: &[bool], start: &[StateId]) -> Option<Witness> {
    let n = a.len();
    let succ = |q: usize| nominal_successors(a, allowed, q);
    let expand = |q: usize| !targets[q];
    let (parent, seen) = bfs(n, start, &succ, &expand);
    if let Some(dead) = (0..n).find(|&q| seen[q] && !targets[q] && succ(q).is_empty()) {
        return Some(Witness { stem: path_to(&parent, dead), cycle: vec![] });
    }
    let mask: Vec<bool> = targets.iter().map(|t| !t).collect();
    lasso_within(n, start, &succ, &expand, &mask).map(|(stem, cycle)| Witness { stem, cycle })
}

/// Finds a nominal outcome from `start` that visits `targets` only finitely often.
pub fn buchi_violation(a: &MetricAutomaton, allowed: &Allowed, targets: &[bool], start: &[StateId]) -> Option<Witness> {
    let n = a.len();
    let succ = |q: usize| nominal_successors(a, allowed, q);
    let expand = |_: usize| true;
    let (parent, seen) = bfs(n, start, &succ, &expand);
    if let Some(dead) = (0..n).find(|&q| seen[q] && succ(q).is_empty()) {
        return Some(Witness { stem: path_to(&parent, dead), cycle: vec![] });
    }
    let mask: Vec<bool> = targets.iter().map(|t| !t).collect();
    lasso_within(n, start, &succ, &expand, &mask).map(|(stem, cycle)| Witness { stem, cycle })
}

/// The nominal lasso of a deterministic strategy: `(stem, cycle)`, or the path to a dead end.
pub fn deterministic_lasso(a: &MetricAutomaton, choice: &[Option<usize>], start: StateId) -> (Vec<StateId>, Vec<StateId>) {
    let mut pos = vec![usize::MAX; a.len()];
    let mut path = Vec::new();
    let mut q = start;
    loop {
        if pos[q] != usize::MAX {
            let cycle = path.split_off(pos[q]);
            return (path, cycle);
        }
        pos[q] = path.len();
        path.push(q);
        match choice[q].and_then(|x| a.nominal(q, x)) {
            Some(p) => q = p,
            None => return (path, vec![]),
        }
    }
}
