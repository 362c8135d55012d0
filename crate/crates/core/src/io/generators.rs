//! Built-in example automata.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::model::{explicit_metric, Acceptance, Gamma, Metric, MetricAutomaton, State, StateId, Transition};
use crate::num::rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("gray code width must be between 1 and 12, got {0}")]
    BitsOutOfRange(usize),
    #[error("unknown leader-election rule `{0}` (expected min, max or floor-avg)")]
    UnknownRule(String),
}

const RUNNING_DISTANCES: [[i64; 7]; 7] = [
    [0, 1, 2, 4, 4, 4, 5],
    [1, 0, 1, 5, 5, 5, 6],
    [2, 1, 0, 6, 6, 7, 8],
    [4, 5, 6, 0, 1, 3, 3],
    [4, 5, 6, 1, 0, 3, 3],
    [4, 5, 7, 3, 3, 0, 1],
    [5, 6, 8, 3, 3, 1, 0],
];

/// The seven-state running example over inputs `a`, `b` with γ = 1 and F = {q6}.
/// With `buchi`, q6 loops back through `a → q0` and `b → q2`.
pub fn running_example(buchi: bool) -> MetricAutomaton {
    let rows: Vec<&[i64]> = RUNNING_DISTANCES.iter().map(|r| r.as_slice()).collect();
    let states = (0..7).map(|i| State::named(format!("q{i}"))).collect();
    let (a, b) = (0, 1);
    let mut edges = vec![
        (0, a, 3),
        (0, b, 1),
        (1, a, 6),
        (1, b, 6),
        (2, a, 3),
        (2, b, 1),
        (3, a, 5),
        (3, b, 5),
        (4, a, 6),
        (4, b, 6),
        (5, a, 6),
        (5, b, 6),
    ];
    if buchi {
        edges.push((6, a, 0));
        edges.push((6, b, 2));
    }
    let transitions = edges
        .into_iter()
        .map(|(from, input, nominal)| Transition { from, input, nominal, disturbed: None })
        .collect();
    let acceptance = if buchi { Acceptance::Buchi(vec![6]) } else { Acceptance::Reachability(vec![6]) };
    MetricAutomaton::new(
        states,
        explicit_metric(&rows),
        0,
        vec!["a".into(), "b".into()],
        transitions,
        Gamma::Constant(rat(1)),
        acceptance,
    )
    .expect("running example is well formed")
}

fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

/// Reflected Gray-code counter on `bits` bits: one input, single-bit disturbances, γ ≡ 1,
/// Büchi objective on the all-zero word.
pub fn gray_code(bits: usize) -> Result<MetricAutomaton, GeneratorError> {
    if !(1..=12).contains(&bits) {
        return Err(GeneratorError::BitsOutOfRange(bits));
    }
    let n = 1usize << bits;
    let mut position = vec![0usize; n];
    for k in 0..n {
        position[gray(k)] = k;
    }
    let word = |code: usize| -> Vec<i64> { (0..bits).rev().map(|i| ((code >> i) & 1) as i64).collect() };
    let states = (0..n)
        .map(|k| {
            let c = word(gray(k));
            State { name: c.iter().map(|b| b.to_string()).collect(), coords: Some(c) }
        })
        .collect();
    let transitions = (0..n)
        .map(|k| {
            let next = (k + 1) % n;
            let code = gray(next);
            let mut disturbed = vec![next];
            disturbed.extend((0..bits).map(|i| position[code ^ (1 << i)]));
            Transition { from: k, input: 0, nominal: next, disturbed: Some(disturbed) }
        })
        .collect();
    Ok(MetricAutomaton::new(
        states,
        Metric::Hamming,
        0,
        vec!["next".into()],
        transitions,
        Gamma::Constant(rat(1)),
        Acceptance::Buchi(vec![0]),
    )
    .expect("gray code automaton is well formed"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElectionRule {
    Min,
    Max,
    FloorAvg,
}

impl std::str::FromStr for ElectionRule {
    type Err = GeneratorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(ElectionRule::Min),
            "max" => Ok(ElectionRule::Max),
            "floor-avg" | "avg" => Ok(ElectionRule::FloorAvg),
            other => Err(GeneratorError::UnknownRule(other.to_string())),
        }
    }
}

/// Neighbours of each node in the diamond 1–2, 1–3, 2–4, 3–4 (0-based).
pub const DIAMOND: [[usize; 2]; 4] = [[1, 2], [0, 3], [0, 3], [1, 2]];

fn apply_rule(rule: ElectionRule, own: i64, m: [i64; 2]) -> i64 {
    match rule {
        ElectionRule::Min => own.min(m[0]).min(m[1]),
        ElectionRule::Max => own.max(m[0]).max(m[1]),
        ElectionRule::FloorAvg => (own + m[0] + m[1]).div_euclid(3),
    }
}

/// One synchronous round of `rule`.
pub fn election_step(rule: ElectionRule, x: [i64; 4]) -> [i64; 4] {
    let mut y = [0; 4];
    for i in 0..4 {
        y[i] = apply_rule(rule, x[i], [x[DIAMOND[i][0]], x[DIAMOND[i][1]]]);
    }
    y
}

/// All outcomes of a round in which at most one message is off by one (clamped to 1..=4).
pub fn election_successors(rule: ElectionRule, x: [i64; 4]) -> BTreeSet<[i64; 4]> {
    let nominal = election_step(rule, x);
    let mut out = BTreeSet::from([nominal]);
    for i in 0..4 {
        for slot in 0..2 {
            for delta in [-1i64, 1] {
                let mut m = [x[DIAMOND[i][0]], x[DIAMOND[i][1]]];
                m[slot] = (m[slot] + delta).clamp(1, 4);
                let mut y = nominal;
                y[i] = apply_rule(rule, x[i], m);
                out.insert(y);
            }
        }
    }
    out
}

/// Four-node leader election on the diamond, starting from values (1,2,3,4),
/// Manhattan metric, γ = 1, reachability of unanimous states.
pub fn leader_election(rule: ElectionRule) -> MetricAutomaton {
    let start = [1i64, 2, 3, 4];
    let mut ids: HashMap<[i64; 4], StateId> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut succ: Vec<(StateId, StateId, Vec<StateId>)> = Vec::new();
    while let Some(x) = queue.pop_front() {
        let from = ids[&x];
        let mut targets = Vec::new();
        for y in election_successors(rule, x) {
            let id = *ids.entry(y).or_insert_with(|| {
                order.push(y);
                queue.push_back(y);
                order.len() - 1
            });
            targets.push(id);
        }
        succ.push((from, ids[&election_step(rule, x)], targets));
    }
    succ.sort_by_key(|t| t.0);
    let states = order
        .iter()
        .map(|x| State {
            name: x.iter().map(|v| v.to_string()).collect(),
            coords: Some(x.to_vec()),
        })
        .collect();
    let transitions = succ
        .into_iter()
        .map(|(from, nominal, disturbed)| Transition { from, input: 0, nominal, disturbed: Some(disturbed) })
        .collect();
    let unanimous = order
        .iter()
        .enumerate()
        .filter(|(_, x)| x.iter().all(|v| *v == x[0]))
        .map(|(i, _)| i)
        .collect();
    MetricAutomaton::new(
        states,
        Metric::Manhattan,
        0,
        vec!["step".into()],
        transitions,
        Gamma::Constant(rat(1)),
        Acceptance::Reachability(unanimous),
    )
    .expect("leader election automaton is well formed")
}
