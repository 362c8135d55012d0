//! Seeded random instances shared by the integration suites.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robsyn::model::{check_coreachability, validate_automaton};
use robsyn::num::rat;
use robsyn::{Acceptance, Gamma, Metric, MetricAutomaton, State, StateId, Strategy, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Reachability,
    Buchi,
    GeneralizedBuchi,
    Parity,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct integer points in the plane, Manhattan distance.
fn points(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut grid: Vec<Vec<i64>> = (0..5).flat_map(|x| (0..5).map(move |y| vec![x, y])).collect();
    grid.shuffle(r);
    grid.truncate(n);
    grid
}

fn random_sets(r: &mut ChaCha8Rng, n: usize, kind: Kind) -> Acceptance {
    let pick = |r: &mut ChaCha8Rng| {
        let mut f: Vec<StateId> = (0..n).filter(|_| r.gen_bool(0.3)).collect();
        if f.is_empty() {
            f.push(r.gen_range(0..n));
        }
        f
    };
    match kind {
        Kind::Reachability => Acceptance::Reachability(pick(r)),
        Kind::Buchi => Acceptance::Buchi(pick(r)),
        Kind::GeneralizedBuchi => {
            let k = r.gen_range(1..=3);
            Acceptance::GeneralizedBuchi((0..k).map(|_| pick(r)).collect())
        }
        Kind::Parity => {
            let colours = [1usize, 3, 5][r.gen_range(0..3)];
            let mut sets = vec![Vec::new(); colours];
            for q in 0..n {
                if r.gen_bool(0.8) {
                    sets[r.gen_range(0..colours)].push(q);
                }
            }
            Acceptance::Parity(sets)
        }
    }
}

/// One attempt; `None` when the draw breaks validation or the coreachability assumption.
fn attempt(r: &mut ChaCha8Rng, kind: Kind, max_states: usize, max_inputs: usize, constant: bool) -> Option<MetricAutomaton> {
    let n = r.gen_range(2..=max_states);
    let k = r.gen_range(1..=max_inputs);
    let states = points(r, n)
        .into_iter()
        .enumerate()
        .map(|(i, c)| State { name: format!("s{i}"), coords: Some(c) })
        .collect();
    let mut transitions = Vec::new();
    for q in 0..n {
        let first = r.gen_range(0..k);
        for x in 0..k {
            if x == first || r.gen_bool(0.7) {
                transitions.push(Transition { from: q, input: x, nominal: r.gen_range(0..n), disturbed: None });
            }
        }
    }
    let gamma = if constant {
        Gamma::Constant(rat(r.gen_range(0..=2)))
    } else {
        Gamma::PerState((0..n).map(|_| rat(r.gen_range(0..=2))).collect())
    };
    let acceptance = random_sets(r, n, kind);
    let inputs = (0..k).map(|x| format!("i{x}")).collect();
    let a = MetricAutomaton::new(states, Metric::Manhattan, 0, inputs, transitions, gamma, acceptance).ok()?;
    let ok = validate_automaton(&a).errors().next().is_none() && check_coreachability(&a).is_valid();
    if !ok {
        return None;
    }
    if let Acceptance::Parity(sets) = &a.acceptance {
        if sets.iter().step_by(2).all(|s| s.is_empty()) {
            return None;
        }
    }
    Some(a)
}

pub fn random_automaton(r: &mut ChaCha8Rng, kind: Kind, max_states: usize, max_inputs: usize) -> MetricAutomaton {
    let constant = r.gen_bool(0.5);
    random_automaton_with(r, kind, max_states, max_inputs, constant)
}

pub fn random_automaton_with(r: &mut ChaCha8Rng, kind: Kind, max_states: usize, max_inputs: usize, constant: bool) -> MetricAutomaton {
    loop {
        if let Some(a) = attempt(r, kind, max_states, max_inputs, constant) {
            return a;
        }
    }
}

/// A seeded suite of `count` instances.
pub fn suite(seed: u64, kind: Kind, count: usize, max_states: usize, max_inputs: usize) -> Vec<MetricAutomaton> {
    let mut r = rng(seed);
    (0..count).map(|_| random_automaton(&mut r, kind, max_states, max_inputs)).collect()
}

/// Every deterministic memoryless strategy choosing an enabled input everywhere it can.
pub fn all_deterministic(a: &MetricAutomaton) -> Vec<Strategy> {
    let mut out = vec![Vec::new()];
    for q in 0..a.len() {
        let en = a.enabled(q);
        if en.is_empty() {
            for v in &mut out {
                v.push(None);
            }
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|v| {
                en.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(Some(x));
                    w
                })
            })
            .collect();
    }
    out.iter().map(|c| Strategy::from_choices(c)).collect()
}
