//! Metric automata: states with a distance, nominal and disturbed transitions,
//! a disturbance bound and an acceptance condition.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::num::{rat, ExtNonNeg, Rat};

pub type StateId = usize;
pub type InputId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub coords: Option<Vec<i64>>,
}

impl State {
    pub fn named(name: impl Into<String>) -> Self {
        State { name: name.into(), coords: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metric {
    /// Square matrix indexed by state id. `Inf` entries give an extended metric.
    Explicit(Vec<Vec<ExtNonNeg>>),
    /// Number of differing coordinates; coordinates must be 0/1.
    Hamming,
    /// Sum of absolute coordinate differences.
    Manhattan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub input: InputId,
    pub nominal: StateId,
    /// `None` means ball semantics.
    pub disturbed: Option<Vec<StateId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gamma {
    Constant(Rat),
    PerState(Vec<Rat>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptance {
    Reachability(Vec<StateId>),
    Buchi(Vec<StateId>),
    GeneralizedBuchi(Vec<Vec<StateId>>),
    /// `sets[j]` holds the states of colour `j`, starting at colour 0.
    Parity(Vec<Vec<StateId>>),
}

impl Acceptance {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Acceptance::Reachability(_) => "reachability",
            Acceptance::Buchi(_) => "buchi",
            Acceptance::GeneralizedBuchi(_) => "generalized_buchi",
            Acceptance::Parity(_) => "parity",
        }
    }

    pub fn sets(&self) -> Vec<&[StateId]> {
        match self {
            Acceptance::Reachability(f) | Acceptance::Buchi(f) => vec![f.as_slice()],
            Acceptance::GeneralizedBuchi(s) | Acceptance::Parity(s) => {
                s.iter().map(|x| x.as_slice()).collect()
            }
        }
    }

    /// The sets a robustness analysis inflates: `F` for reachability and Büchi,
    /// every `F_k` for generalized Büchi, the even-coloured sets for parity.
    pub fn target_sets(&self) -> Vec<Vec<StateId>> {
        match self {
            Acceptance::Reachability(f) | Acceptance::Buchi(f) => vec![f.clone()],
            Acceptance::GeneralizedBuchi(s) => s.clone(),
            Acceptance::Parity(s) => s.iter().step_by(2).cloned().collect(),
        }
    }

    /// Colour of each state under a parity condition.
    pub fn colours(&self, n_states: usize) -> Vec<Option<usize>> {
        let mut c = vec![None; n_states];
        if let Acceptance::Parity(sets) = self {
            for (j, set) in sets.iter().enumerate() {
                for &q in set {
                    if c[q].is_none() {
                        c[q] = Some(j);
                    }
                }
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("automaton has no states")]
    NoStates,
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("input index {0} out of range")]
    InputOutOfRange(usize),
    #[error("duplicate transition for state `{0}` and input `{1}`")]
    DuplicateTransition(String, String),
    #[error("metric matrix must be {0}x{0}")]
    MatrixShape(usize),
    #[error("state `{0}` needs coordinates for this metric")]
    MissingCoords(String),
    #[error("coordinate vectors have different lengths")]
    CoordLength,
    #[error("hamming coordinates must be 0 or 1 (state `{0}`)")]
    NonBinaryCoord(String),
    #[error("per-state gamma has {got} entries, expected {expected}")]
    GammaLength { expected: usize, got: usize },
    #[error("gamma must be non-negative")]
    NegativeGamma,
    #[error("strategy: {0}")]
    Strategy(String),
}

/// A single validation finding. Violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateName(String),
    NonZeroSelfDistance(StateId),
    Indiscernible(StateId, StateId),
    Asymmetric(StateId, StateId),
    Triangle(StateId, StateId, StateId),
    GammaBound { from: StateId, input: InputId, target: StateId },
    NominalNotDisturbed { from: StateId, input: InputId },
    Unreachable(StateId),
    EmptyAcceptanceSet(usize),
    ParityOverlap(StateId),
    NotCoreachable { state: StateId, set: usize },
    OddWithoutLowerEven(StateId),
}

impl Violation {
    /// Findings that do not stop a document from loading. The running example's
    /// distance table itself breaks the triangle inequality, and none of the
    /// analyses rely on it; unreachable states are simply never visited.
    pub fn is_warning(&self) -> bool {
        matches!(self, Violation::Triangle(..) | Violation::Unreachable(_))
    }

    pub fn describe(&self, a: &MetricAutomaton) -> String {
        let n = |q: &StateId| a.name(*q).to_string();
        let i = |x: &InputId| a.inputs[*x].clone();
        match self {
            Violation::DuplicateName(s) => format!("duplicate state name `{s}`"),
            Violation::NonZeroSelfDistance(q) => format!("d({0},{0}) is not 0", n(q)),
            Violation::Indiscernible(p, q) => {
                format!("identity of indiscernibles: d({},{}) = 0", n(p), n(q))
            }
            Violation::Asymmetric(p, q) => format!("asymmetric: d({0},{1}) != d({1},{0})", n(p), n(q)),
            Violation::Triangle(p, q, r) => format!(
                "triangle inequality: d({0},{2}) > d({0},{1}) + d({1},{2})",
                n(p),
                n(q),
                n(r)
            ),
            Violation::GammaBound { from, input, target } => format!(
                "disturbed successor {} of ({}, {}) is farther than gamma from the nominal target",
                n(target),
                n(from),
                i(input)
            ),
            Violation::NominalNotDisturbed { from, input } => format!(
                "nominal target of ({}, {}) is missing from its disturbed set",
                n(from),
                i(input)
            ),
            Violation::Unreachable(q) => format!("state {} is unreachable from the initial state", n(q)),
            Violation::EmptyAcceptanceSet(k) => format!("acceptance set {k} is empty"),
            Violation::ParityOverlap(q) => format!("state {} has more than one colour", n(q)),
            Violation::NotCoreachable { state, set } => format!(
                "state {} has no nominal path to acceptance set {}",
                n(state),
                set
            ),
            Violation::OddWithoutLowerEven(q) => format!(
                "odd-coloured state {} has no nominal path to a smaller even colour",
                n(q)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, a: &MetricAutomaton) -> Vec<String> {
        self.violations.iter().map(|v| v.describe(a)).collect()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.is_warning())
    }
}

/// Set-valued choice of inputs per state.
pub type Allowed = Vec<Vec<InputId>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// `choices[q]`, sorted by input declaration order; empty means undefined.
    Memoryless(Vec<Vec<InputId>>),
    /// `choices[q][k]` for counter value `k`.
    Indexed(Vec<Vec<Vec<InputId>>>),
}

impl Strategy {
    /// The given input wherever it is enabled.
    pub fn uniform(a: &MetricAutomaton, input: InputId) -> Strategy {
        Strategy::Memoryless(
            (0..a.len())
                .map(|q| if a.nominal(q, input).is_some() { vec![input] } else { vec![] })
                .collect(),
        )
    }

    /// Deterministic strategy from a per-state optional choice.
    pub fn from_choices(choices: &[Option<InputId>]) -> Strategy {
        Strategy::Memoryless(choices.iter().map(|c| c.iter().copied().collect()).collect())
    }

    pub fn memoryless(&self) -> Option<&Vec<Vec<InputId>>> {
        match self {
            Strategy::Memoryless(c) => Some(c),
            Strategy::Indexed(_) => None,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            Strategy::Memoryless(c) => c.iter().all(|s| s.len() <= 1),
            Strategy::Indexed(c) => c.iter().flatten().all(|s| s.len() <= 1),
        }
    }

    /// Single choice per state, for deterministic memoryless strategies.
    pub fn choice(&self, q: StateId) -> Option<InputId> {
        match self {
            Strategy::Memoryless(c) => c.get(q).and_then(|s| s.first().copied()),
            Strategy::Indexed(_) => None,
        }
    }

    pub fn check_against(&self, a: &MetricAutomaton) -> Result<(), ModelError> {
        let check_set = |q: StateId, set: &Vec<InputId>| -> Result<(), ModelError> {
            for &x in set {
                if x >= a.inputs.len() {
                    return Err(ModelError::InputOutOfRange(x));
                }
                if a.nominal(q, x).is_none() {
                    return Err(ModelError::Strategy(format!(
                        "input `{}` chosen at `{}` has no transition",
                        a.inputs[x],
                        a.name(q)
                    )));
                }
            }
            Ok(())
        };
        match self {
            Strategy::Memoryless(c) => {
                if c.len() != a.len() {
                    return Err(ModelError::Strategy("wrong number of states".into()));
                }
                for (q, s) in c.iter().enumerate() {
                    check_set(q, s)?;
                }
            }
            Strategy::Indexed(c) => {
                if c.len() != a.len() {
                    return Err(ModelError::Strategy("wrong number of states".into()));
                }
                for (q, per) in c.iter().enumerate() {
                    for s in per {
                        check_set(q, s)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MetricAutomaton {
    pub states: Vec<State>,
    pub metric: Metric,
    pub initial: StateId,
    pub inputs: Vec<String>,
    pub transitions: Vec<Transition>,
    pub gamma: Gamma,
    pub acceptance: Acceptance,
    nominal: Vec<Vec<Option<StateId>>>,
    post: Vec<Vec<Vec<StateId>>>,
    index: HashMap<String, StateId>,
}

impl MetricAutomaton {
    pub fn new(
        states: Vec<State>,
        metric: Metric,
        initial: StateId,
        inputs: Vec<String>,
        transitions: Vec<Transition>,
        gamma: Gamma,
        acceptance: Acceptance,
    ) -> Result<Self, ModelError> {
        let n = states.len();
        if n == 0 {
            return Err(ModelError::NoStates);
        }
        if initial >= n {
            return Err(ModelError::StateOutOfRange(initial));
        }
        match &metric {
            Metric::Explicit(m) => {
                if m.len() != n || m.iter().any(|r| r.len() != n) {
                    return Err(ModelError::MatrixShape(n));
                }
            }
            Metric::Hamming | Metric::Manhattan => {
                let mut len = None;
                for s in &states {
                    let c = s.coords.as_ref().ok_or_else(|| ModelError::MissingCoords(s.name.clone()))?;
                    if *len.get_or_insert(c.len()) != c.len() {
                        return Err(ModelError::CoordLength);
                    }
                    if matches!(metric, Metric::Hamming) && c.iter().any(|&b| b != 0 && b != 1) {
                        return Err(ModelError::NonBinaryCoord(s.name.clone()));
                    }
                }
            }
        }
        match &gamma {
            Gamma::Constant(g) if g.is_negative() => return Err(ModelError::NegativeGamma),
            Gamma::PerState(v) if v.len() != n => {
                return Err(ModelError::GammaLength { expected: n, got: v.len() })
            }
            Gamma::PerState(v) if v.iter().any(|g| g.is_negative()) => {
                return Err(ModelError::NegativeGamma)
            }
            _ => {}
        }
        for set in acceptance.sets() {
            if let Some(&q) = set.iter().find(|&&q| q >= n) {
                return Err(ModelError::StateOutOfRange(q));
            }
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            index.entry(s.name.clone()).or_insert(i);
        }
        let mut a = MetricAutomaton {
            nominal: vec![vec![None; inputs.len()]; n],
            post: vec![vec![Vec::new(); inputs.len()]; n],
            states,
            metric,
            initial,
            inputs,
            transitions,
            gamma,
            acceptance,
            index,
        };
        for t in &a.transitions {
            for q in [t.from, t.nominal] {
                if q >= n {
                    return Err(ModelError::StateOutOfRange(q));
                }
            }
            if t.input >= a.inputs.len() {
                return Err(ModelError::InputOutOfRange(t.input));
            }
            if a.nominal[t.from][t.input].is_some() {
                return Err(ModelError::DuplicateTransition(
                    a.states[t.from].name.clone(),
                    a.inputs[t.input].clone(),
                ));
            }
            a.nominal[t.from][t.input] = Some(t.nominal);
        }
        let mut post = vec![vec![Vec::new(); a.inputs.len()]; n];
        for t in &a.transitions {
            let mut set = match &t.disturbed {
                Some(list) => {
                    if let Some(&q) = list.iter().find(|&&q| q >= n) {
                        return Err(ModelError::StateOutOfRange(q));
                    }
                    list.clone()
                }
                None => a.ball(t.nominal),
            };
            set.sort_unstable();
            set.dedup();
            post[t.from][t.input] = set;
        }
        a.post = post;
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.states[q].name
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn input_id(&self, name: &str) -> Option<InputId> {
        self.inputs.iter().position(|x| x == name)
    }

    pub fn d(&self, p: StateId, q: StateId) -> ExtNonNeg {
        match &self.metric {
            Metric::Explicit(m) => m[p][q].clone(),
            Metric::Hamming | Metric::Manhattan => {
                let a = self.states[p].coords.as_ref().expect("coords checked at construction");
                let b = self.states[q].coords.as_ref().expect("coords checked at construction");
                let s: i64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
                ExtNonNeg::int(s)
            }
        }
    }

    pub fn gamma_of(&self, q: StateId) -> Rat {
        match &self.gamma {
            Gamma::Constant(g) => g.clone(),
            Gamma::PerState(v) => v[q].clone(),
        }
    }

    /// γ̄, the largest disturbance radius.
    pub fn gamma_bar(&self) -> Rat {
        match &self.gamma {
            Gamma::Constant(g) => g.clone(),
            Gamma::PerState(v) => v.iter().max().cloned().unwrap_or_else(Rat::zero),
        }
    }

    /// Closed ball of radius γ(q) around `q`.
    pub fn ball(&self, q: StateId) -> Vec<StateId> {
        let r = ExtNonNeg::Fin(self.gamma_of(q));
        (0..self.len()).filter(|&p| self.d(p, q) <= r).collect()
    }

    pub fn nominal(&self, q: StateId, a: InputId) -> Option<StateId> {
        self.nominal[q][a]
    }

    /// Disturbed successors of `(q, a)`, sorted; empty when no transition exists.
    pub fn post_input(&self, q: StateId, a: InputId) -> &[StateId] {
        &self.post[q][a]
    }

    pub fn enabled(&self, q: StateId) -> Vec<InputId> {
        (0..self.inputs.len()).filter(|&a| self.nominal[q][a].is_some()).collect()
    }

    pub fn all_allowed(&self) -> Allowed {
        (0..self.len()).map(|q| self.enabled(q)).collect()
    }

    /// d(q, F); infinite for an empty set.
    pub fn distance_to_set(&self, q: StateId, set: &[StateId]) -> ExtNonNeg {
        set.iter().map(|&p| self.d(q, p)).min().unwrap_or(ExtNonNeg::Inf)
    }

    pub fn distances_to_set(&self, set: &[StateId]) -> Vec<ExtNonNeg> {
        (0..self.len()).map(|q| self.distance_to_set(q, set)).collect()
    }

    /// Post_w(q) for a word of input ids.
    pub fn post(&self, q: StateId, word: &[InputId]) -> Vec<StateId> {
        let mut cur = vec![q];
        for &x in word {
            let mut next: Vec<StateId> = cur.iter().flat_map(|&p| self.post[p][x].iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            cur = next;
        }
        cur
    }

    /// States reachable from `from` (inclusive) along disturbed transitions of allowed inputs.
    pub fn reachable_from(&self, from: StateId, allowed: &Allowed) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(q) = queue.pop_front() {
            for &x in &allowed[q] {
                for &p in &self.post[q][x] {
                    if !seen[p] {
                        seen[p] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
        seen
    }

    /// States with a nominal path (any inputs) into `targets`.
    pub fn nominally_coreachable(&self, targets: &[bool]) -> Vec<bool> {
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.len()];
        for q in 0..self.len() {
            for p in self.nominal[q].iter().flatten() {
                rev[*p].push(q);
            }
        }
        let mut seen = targets.to_vec();
        let mut queue: VecDeque<StateId> = (0..self.len()).filter(|&q| targets[q]).collect();
        while let Some(p) = queue.pop_front() {
            for &q in &rev[p] {
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> ValidationReport {
        validate_automaton(self)
    }
}

pub fn set_mask(n: usize, set: &[StateId]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &q in set {
        m[q] = true;
    }
    m
}

/// Checks metric axioms, the γ-bound, reachability, names and acceptance sets.
pub fn validate_automaton(a: &MetricAutomaton) -> ValidationReport {
    let n = a.len();
    let mut v = Vec::new();
    let mut seen = HashSet::new();
    for s in &a.states {
        if !seen.insert(s.name.as_str()) {
            v.push(Violation::DuplicateName(s.name.clone()));
        }
    }
    match &a.metric {
        Metric::Explicit(m) => {
            for p in 0..n {
                if !m[p][p].is_zero() {
                    v.push(Violation::NonZeroSelfDistance(p));
                }
                for q in 0..n {
                    if p < q && (m[p][q].is_zero() || m[q][p].is_zero()) {
                        v.push(Violation::Indiscernible(p, q));
                    }
                    if p < q && m[p][q] != m[q][p] {
                        v.push(Violation::Asymmetric(p, q));
                    }
                }
            }
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        if m[p][r] > m[p][q].add(&m[q][r]) {
                            v.push(Violation::Triangle(p, q, r));
                        }
                    }
                }
            }
        }
        Metric::Hamming | Metric::Manhattan => {
            let mut by_coords: HashMap<&Vec<i64>, StateId> = HashMap::new();
            for (q, s) in a.states.iter().enumerate() {
                let c = s.coords.as_ref().expect("coords checked at construction");
                if let Some(&p) = by_coords.get(c) {
                    v.push(Violation::Indiscernible(p, q));
                } else {
                    by_coords.insert(c, q);
                }
            }
        }
    }
    for t in &a.transitions {
        let post = a.post_input(t.from, t.input);
        if post.binary_search(&t.nominal).is_err() {
            v.push(Violation::NominalNotDisturbed { from: t.from, input: t.input });
        }
        let r = ExtNonNeg::Fin(a.gamma_of(t.nominal));
        for &p in post {
            if a.d(p, t.nominal) > r {
                v.push(Violation::GammaBound { from: t.from, input: t.input, target: p });
            }
        }
    }
    let reach = a.reachable_from(a.initial, &a.all_allowed());
    v.extend((0..n).filter(|&q| !reach[q]).map(Violation::Unreachable));
    match &a.acceptance {
        Acceptance::Reachability(f) | Acceptance::Buchi(f) => {
            if f.is_empty() {
                v.push(Violation::EmptyAcceptanceSet(0));
            }
        }
        Acceptance::GeneralizedBuchi(sets) => {
            if sets.is_empty() {
                v.push(Violation::EmptyAcceptanceSet(0));
            }
            for (k, s) in sets.iter().enumerate() {
                if s.is_empty() {
                    v.push(Violation::EmptyAcceptanceSet(k));
                }
            }
        }
        Acceptance::Parity(sets) => {
            if sets.is_empty() {
                v.push(Violation::EmptyAcceptanceSet(0));
            }
            let mut count = vec![0usize; n];
            for s in sets {
                let mut uniq = s.clone();
                uniq.sort_unstable();
                uniq.dedup();
                for q in uniq {
                    count[q] += 1;
                }
            }
            v.extend((0..n).filter(|&q| count[q] > 1).map(Violation::ParityOverlap));
        }
    }
    ValidationReport { violations: v }
}

/// Nominal coreachability of the acceptance sets.
pub fn check_coreachability(a: &MetricAutomaton) -> ValidationReport {
    let n = a.len();
    let mut v = Vec::new();
    match &a.acceptance {
        Acceptance::Reachability(f) | Acceptance::Buchi(f) => {
            let co = a.nominally_coreachable(&set_mask(n, f));
            v.extend((0..n).filter(|&q| !co[q]).map(|q| Violation::NotCoreachable { state: q, set: 0 }));
        }
        Acceptance::GeneralizedBuchi(sets) => {
            for (k, f) in sets.iter().enumerate() {
                let co = a.nominally_coreachable(&set_mask(n, f));
                v.extend((0..n).filter(|&q| !co[q]).map(|q| Violation::NotCoreachable { state: q, set: k }));
            }
        }
        Acceptance::Parity(sets) => {
            let colours = a.acceptance.colours(n);
            let mut any_even = vec![false; n];
            let mut below: Vec<Vec<bool>> = Vec::new();
            let mut lower = vec![false; n];
            for (j, s) in sets.iter().enumerate() {
                if j % 2 == 0 {
                    for &q in s {
                        lower[q] = true;
                        any_even[q] = true;
                    }
                }
                below.push(a.nominally_coreachable(&lower));
            }
            let co_even = a.nominally_coreachable(&any_even);
            for q in 0..n {
                if !co_even[q] {
                    v.push(Violation::NotCoreachable { state: q, set: 0 });
                } else if let Some(j) = colours[q] {
                    // even colours strictly below j are F_0..F_{j-1}
                    if j % 2 == 1 && !below[j - 1][q] {
                        v.push(Violation::OddWithoutLowerEven(q));
                    }
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// A strategy-restricted automaton together with the original ids of its states.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub automaton: MetricAutomaton,
    pub original: Vec<StateId>,
}

/// A|_S: the states reachable from the initial state under `s`, keeping only chosen inputs.
pub fn restrict_by_strategy(a: &MetricAutomaton, s: &Strategy) -> Result<Restriction, ModelError> {
    s.check_against(a)?;
    let choices = s
        .memoryless()
        .ok_or_else(|| ModelError::Strategy("restriction needs a memoryless strategy".into()))?;
    let reach = a.reachable_from(a.initial, choices);
    for q in 0..a.len() {
        if reach[q] && choices[q].is_empty() && !a.enabled(q).is_empty() {
            return Err(ModelError::Strategy(format!(
                "strategy undefined at reachable state `{}`",
                a.name(q)
            )));
        }
    }
    let original: Vec<StateId> = (0..a.len()).filter(|&q| reach[q]).collect();
    let mut new_id = vec![usize::MAX; a.len()];
    for (i, &q) in original.iter().enumerate() {
        new_id[q] = i;
    }
    let states = original.iter().map(|&q| a.states[q].clone()).collect();
    let metric = match &a.metric {
        Metric::Explicit(m) => Metric::Explicit(
            original.iter().map(|&p| original.iter().map(|&q| m[p][q].clone()).collect()).collect(),
        ),
        other => other.clone(),
    };
    let mut transitions = Vec::new();
    for &q in &original {
        for &x in &choices[q] {
            transitions.push(Transition {
                from: new_id[q],
                input: x,
                nominal: new_id[a.nominal(q, x).expect("checked")],
                disturbed: Some(a.post_input(q, x).iter().map(|&p| new_id[p]).collect()),
            });
        }
    }
    let gamma = match &a.gamma {
        Gamma::Constant(g) => Gamma::Constant(g.clone()),
        Gamma::PerState(v) => Gamma::PerState(original.iter().map(|&q| v[q].clone()).collect()),
    };
    let map_set = |s: &[StateId]| -> Vec<StateId> {
        s.iter().filter(|&&q| reach[q]).map(|&q| new_id[q]).collect()
    };
    let acceptance = match &a.acceptance {
        Acceptance::Reachability(f) => Acceptance::Reachability(map_set(f)),
        Acceptance::Buchi(f) => Acceptance::Buchi(map_set(f)),
        Acceptance::GeneralizedBuchi(s) => Acceptance::GeneralizedBuchi(s.iter().map(|x| map_set(x)).collect()),
        Acceptance::Parity(s) => Acceptance::Parity(s.iter().map(|x| map_set(x)).collect()),
    };
    let automaton = MetricAutomaton::new(
        states,
        metric,
        new_id[a.initial],
        a.inputs.clone(),
        transitions,
        gamma,
        acceptance,
    )?;
    Ok(Restriction { automaton, original })
}

impl fmt::Display for MetricAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} states, {} inputs, {} transitions, {} acceptance",
            self.len(),
            self.inputs.len(),
            self.transitions.len(),
            self.acceptance.kind_name()
        )
    }
}

/// Builder used by tests and generators: explicit metric given as a symmetric table.
pub fn explicit_metric(rows: &[&[i64]]) -> Metric {
    Metric::Explicit(rows.iter().map(|r| r.iter().map(|&x| ExtNonNeg::Fin(rat(x))).collect()).collect())
}
