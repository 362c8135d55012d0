//! Transient faults: the N-bound on fault spacing, exhaustive search against
//! N-bounded adversaries and scripted or seeded simulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificates::{check_clf, construct_clf_from_strategy, contained_in_induced};
use crate::error::AnalysisError;
use crate::graph::{bfs, cycle_through, on_cycle_within, path_to};
use crate::model::{set_mask, Acceptance, InputId, MetricAutomaton, StateId, Strategy};
use crate::nominal::deterministic_lasso;
use crate::num::{rat, ExtNonNeg};
use crate::parity::{colours, cycle_wins, parity_recurrence_raw, verify_parity_sigma};
use crate::reach::{buchi_recurrence_raw, verify};
use crate::robustness::{inflate, sigma_from_raw};

pub const DEFAULT_SEARCH_CAP: usize = 10;

/// One contribution to the bound: `|τ^S(q, F)|` for `q ∈ F′` of target set `set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLength {
    pub set: usize,
    pub state: StateId,
    /// Number of states on the nominal trace up to and including the first hit; `None` if never.
    pub length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultBound {
    /// `None` stands for ∞.
    pub n: Option<usize>,
    pub sigma: ExtNonNeg,
    pub lengths: Vec<TraceLength>,
    /// The constructed CLF checks and contains the strategy.
    pub pedigree: bool,
    /// Finite bound with pedigree.
    pub certified: bool,
}

fn deterministic(a: &MetricAutomaton, s: &Strategy) -> Result<Vec<Option<InputId>>, AnalysisError> {
    s.check_against(a)?;
    let c = s
        .memoryless()
        .ok_or_else(|| AnalysisError::Unsupported("fault analysis needs a memoryless strategy".into()))?;
    if !s.is_deterministic() {
        return Err(AnalysisError::Unsupported("fault analysis needs a deterministic strategy".into()));
    }
    Ok(c.iter().map(|v| v.first().copied()).collect())
}

/// States on the nominal trace from `q` up to the first state of `mask`.
fn trace_length(a: &MetricAutomaton, choice: &[Option<InputId>], mask: &[bool], q: StateId) -> Option<usize> {
    let mut seen = vec![false; a.len()];
    let mut p = q;
    let mut len = 1;
    loop {
        if mask[p] {
            return Some(len);
        }
        if seen[p] {
            return None;
        }
        seen[p] = true;
        p = choice[p].and_then(|x| a.nominal(p, x))?;
        len += 1;
    }
}

fn pedigree(a: &MetricAutomaton, s: &Strategy) -> bool {
    let Ok(cert) = construct_clf_from_strategy(a, s, rat(1)) else { return false };
    let valid = check_clf(a, &cert).map(|r| r.is_valid()).unwrap_or(false);
    let all: Vec<StateId> = (0..a.len()).collect();
    valid && contained_in_induced(a, &cert, s, &all).map(|b| b.is_empty()).unwrap_or(false)
}

/// `N = max_{q ∈ F′} |τ^S(q, F)|`; for parity the maximum runs over every even set
/// and drops infinite entries.
pub fn compute_fault_bound(a: &MetricAutomaton, s: &Strategy) -> Result<FaultBound, AnalysisError> {
    let choice = deterministic(a, s)?;
    let (mut rep, parity) = match &a.acceptance {
        Acceptance::Reachability(_) | Acceptance::Buchi(_) => (verify(a, s)?, false),
        Acceptance::Parity(_) => (verify_parity_sigma(a, s)?, true),
        Acceptance::GeneralizedBuchi(_) => {
            return Err(AnalysisError::Unsupported("fault bounds cover Büchi and parity objectives".into()))
        }
    };
    let sets = a.acceptance.target_sets();
    // The bound needs plays to return to F′ forever, not just once.
    let allowed = s.memoryless().expect("checked");
    let rec = match &a.acceptance {
        Acceptance::Buchi(f) => buchi_recurrence_raw(a, allowed, f),
        Acceptance::Parity(all) => parity_recurrence_raw(a, allowed, all),
        _ => ExtNonNeg::zero(),
    };
    let (sigma, _) = sigma_from_raw(&rec, &a.gamma_bar());
    if sigma > rep.sigma {
        rep.inflated = inflate(a, &sets, &sigma);
        rep.sigma = sigma;
    }
    let mut lengths = Vec::new();
    for (i, (f, inflated)) in sets.iter().zip(&rep.inflated).enumerate() {
        let mask = set_mask(a.len(), f);
        for &q in inflated {
            lengths.push(TraceLength { set: i, state: q, length: trace_length(a, &choice, &mask, q) });
        }
    }
    let n = if parity {
        lengths.iter().filter_map(|t| t.length).max()
    } else if lengths.iter().all(|t| t.length.is_some()) {
        lengths.iter().filter_map(|t| t.length).max()
    } else {
        None
    };
    let pedigree = pedigree(a, s);
    Ok(FaultBound { n, sigma: rep.sigma, lengths, pedigree, certified: pedigree && n.is_some() })
}

/// A violating play: `stem · cycle^ω`, with the transition out of each position marked
/// when it is a fault. An empty cycle means the play ends in a dead end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultLasso {
    pub stem: Vec<StateId>,
    pub cycle: Vec<StateId>,
    pub stem_faults: Vec<bool>,
    pub cycle_faults: Vec<bool>,
}

impl FaultLasso {
    /// Fault script reproducing the stem and `repeats` rounds of the cycle,
    /// as `(transition number, target)` pairs numbered from 1.
    pub fn script(&self, repeats: usize) -> (Vec<(usize, StateId)>, Vec<StateId>) {
        let mut states = self.stem.clone();
        let mut faults = self.stem_faults.clone();
        for _ in 0..repeats {
            states.extend(&self.cycle);
            faults.extend(&self.cycle_faults);
        }
        if !self.cycle.is_empty() {
            states.push(self.cycle[0]);
        }
        let script = (0..states.len().saturating_sub(1))
            .filter(|&t| faults[t])
            .map(|t| (t + 1, states[t + 1]))
            .collect();
        (script, states)
    }

    pub fn describe(&self, a: &MetricAutomaton) -> String {
        let show = |v: &[StateId], f: &[bool]| {
            v.iter()
                .zip(f.iter().chain(std::iter::repeat(&false)))
                .map(|(&q, &fault)| if fault { format!("{}~>", a.name(q)) } else { a.name(q).to_string() })
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.cycle.is_empty() {
            format!("dead end after {}", show(&self.stem, &self.stem_faults))
        } else {
            format!("{} ({})^ω", show(&self.stem, &self.stem_faults), show(&self.cycle, &self.cycle_faults))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub n_bound: usize,
    pub violation: Option<FaultLasso>,
    /// Reachable product nodes.
    pub explored: usize,
}

struct Product<'a> {
    a: &'a MetricAutomaton,
    choice: Vec<Option<InputId>>,
    n: usize,
}

impl Product<'_> {
    fn size(&self) -> usize {
        self.a.len() * (self.n + 1)
    }

    fn node(&self, q: StateId, c: usize) -> usize {
        q * (self.n + 1) + c
    }

    fn split(&self, u: usize) -> (StateId, usize) {
        (u / (self.n + 1), u % (self.n + 1))
    }

    fn succ(&self, u: usize) -> Vec<usize> {
        let (q, c) = self.split(u);
        let Some(x) = self.choice[q] else { return vec![] };
        let nom = self.a.nominal(q, x).expect("checked");
        let mut out = vec![self.node(nom, (c + 1).min(self.n))];
        if c >= self.n {
            for &p in self.a.post_input(q, x) {
                if p != nom {
                    out.push(self.node(p, 1.min(self.n)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn is_fault(&self, u: usize, v: usize) -> bool {
        let (q, _) = self.split(u);
        let (p, _) = self.split(v);
        self.choice[q].and_then(|x| self.a.nominal(q, x)) != Some(p)
    }
}

/// A reachable cycle within `mask` through some node satisfying `pivot`.
fn bad_lasso(
    n: usize,
    start: usize,
    succ: &dyn Fn(usize) -> Vec<usize>,
    expand: &dyn Fn(usize) -> bool,
    mask: &dyn Fn(usize) -> bool,
    pivot: &dyn Fn(usize) -> bool,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let (parent, seen) = bfs(n, &[start], succ, expand);
    let inside: Vec<bool> = (0..n).map(|u| seen[u] && expand(u) && mask(u)).collect();
    let cyc = on_cycle_within(n, succ, &inside);
    let u = (0..n).filter(|&u| cyc[u] && pivot(u)).min_by_key(|&u| path_to(&parent, u).len())?;
    let cycle = cycle_through(n, u, succ, &|v| inside[v])?;
    let mut stem = path_to(&parent, u);
    stem.pop();
    Some((stem, cycle))
}

/// Exact model checking of `s` against every adversary whose faults are at least
/// `n_bound` transitions apart.
pub fn exhaustive_adversary_search(a: &MetricAutomaton, s: &Strategy, n_bound: usize, cap: usize) -> Result<SearchOutcome, AnalysisError> {
    if a.len() > cap {
        return Err(AnalysisError::CapExceeded { size: a.len(), cap });
    }
    let choice = deterministic(a, s)?;
    let prod = Product { a, choice, n: n_bound };
    let size = prod.size();
    let start = prod.node(a.initial, n_bound);
    let succ = |u: usize| prod.succ(u);
    let q_of = |u: usize| prod.split(u).0;
    let (targets, reach_only) = match &a.acceptance {
        Acceptance::Reachability(f) => (set_mask(a.len(), f), true),
        Acceptance::Buchi(f) => (set_mask(a.len(), f), false),
        Acceptance::Parity(_) => (vec![false; a.len()], false),
        Acceptance::GeneralizedBuchi(_) => {
            return Err(AnalysisError::Unsupported("fault search covers reachability, Büchi and parity objectives".into()))
        }
    };
    let expand = |u: usize| !(reach_only && targets[q_of(u)]);
    let (parent, seen) = bfs(size, &[start], &succ, &expand);
    let explored = seen.iter().filter(|&&b| b).count();
    let mut found: Option<(Vec<usize>, Vec<usize>)> = None;
    if let Some(dead) = (0..size).find(|&u| seen[u] && expand(u) && succ(u).is_empty()) {
        found = Some((path_to(&parent, dead), vec![]));
    }
    if found.is_none() {
        found = match &a.acceptance {
            Acceptance::Parity(sets) => {
                let col = colours(a.len(), sets);
                let mut hit = bad_lasso(size, start, &succ, &expand, &|u| col[q_of(u)].is_none(), &|_| true);
                for j in (1..sets.len()).step_by(2) {
                    if hit.is_some() {
                        break;
                    }
                    hit = bad_lasso(
                        size,
                        start,
                        &succ,
                        &expand,
                        &|u| col[q_of(u)].map_or(true, |c| c >= j),
                        &|u| col[q_of(u)] == Some(j),
                    );
                }
                hit
            }
            _ => bad_lasso(size, start, &succ, &expand, &|u| !targets[q_of(u)], &|_| true),
        };
    }
    let violation = found.map(|(stem, cycle)| {
        let seq: Vec<usize> = stem.iter().chain(&cycle).copied().collect();
        let stem_faults = (0..stem.len())
            .map(|i| seq.get(i + 1).map_or(false, |&v| prod.is_fault(stem[i], v)))
            .collect();
        let cycle_faults = (0..cycle.len()).map(|i| prod.is_fault(cycle[i], cycle[(i + 1) % cycle.len()])).collect();
        FaultLasso {
            stem: stem.iter().map(|&u| q_of(u)).collect(),
            cycle: cycle.iter().map(|&u| q_of(u)).collect(),
            stem_faults,
            cycle_faults,
        }
    });
    Ok(SearchOutcome { n_bound, violation, explored })
}

/// Smallest spacing in `0..=max_n` at which the search finds no violation.
pub fn empirical_threshold(a: &MetricAutomaton, s: &Strategy, max_n: usize, cap: usize) -> Result<Option<usize>, AnalysisError> {
    for n in 0..=max_n {
        if exhaustive_adversary_search(a, s, n, cap)?.violation.is_none() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adversary {
    Nominal,
    /// Faults at random whenever the spacing allows, each with probability one half.
    Random { seed: u64, n_bound: usize },
    /// `(transition number from 1, target state)`.
    Scripted { faults: Vec<(usize, StateId)>, n_bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRun {
    pub trace: Vec<StateId>,
    /// Transition numbers (from 1) that were faults.
    pub faults: Vec<usize>,
    /// States seen infinitely often once the run continues without faults.
    pub limit_cycle: Vec<StateId>,
    pub accepted: bool,
    pub seed: Option<u64>,
}

fn check_script(faults: &[(usize, StateId)], n_bound: usize) -> Result<(), AnalysisError> {
    for w in faults.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(AnalysisError::Script("fault positions must be strictly increasing".into()));
        }
        if w[1].0 - w[0].0 < n_bound {
            return Err(AnalysisError::Script(format!(
                "faults at transitions {} and {} are closer than {n_bound}",
                w[0].0, w[1].0
            )));
        }
    }
    if faults.first().is_some_and(|f| f.0 == 0) {
        return Err(AnalysisError::Script("transitions are numbered from 1".into()));
    }
    Ok(())
}

/// Runs `s` for at most `steps` transitions, then judges acceptance on the
/// fault-free continuation.
pub fn simulate_run(a: &MetricAutomaton, s: &Strategy, adversary: &Adversary, steps: usize) -> Result<SimRun, AnalysisError> {
    let choice = deterministic(a, s)?;
    let mut rng = match adversary {
        Adversary::Random { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let (script, n_bound) = match adversary {
        Adversary::Scripted { faults, n_bound } => {
            check_script(faults, *n_bound)?;
            (faults.clone(), *n_bound)
        }
        Adversary::Random { n_bound, .. } => (vec![], *n_bound),
        Adversary::Nominal => (vec![], 0),
    };
    let mut trace = vec![a.initial];
    let mut faults = Vec::new();
    let mut since = usize::MAX;
    let mut q = a.initial;
    for t in 1..=steps {
        let Some(x) = choice[q] else { break };
        let nom = a.nominal(q, x).expect("checked");
        let post = a.post_input(q, x);
        let mut next = nom;
        if let Some(&(_, target)) = script.iter().find(|f| f.0 == t) {
            if !post.contains(&target) {
                return Err(AnalysisError::Script(format!(
                    "`{}` is not a disturbed successor of `{}` at transition {t}",
                    a.name(target),
                    a.name(q)
                )));
            }
            next = target;
        } else if let Some(r) = rng.as_mut() {
            let others: Vec<StateId> = post.iter().copied().filter(|&p| p != nom).collect();
            if since >= n_bound && !others.is_empty() && r.gen_bool(0.5) {
                next = others[r.gen_range(0..others.len())];
            }
        }
        if next != nom {
            faults.push(t);
            since = 1;
        } else {
            since = since.saturating_add(1);
        }
        q = next;
        trace.push(q);
    }
    let (_, cycle) = deterministic_lasso(a, &choice, q);
    let accepted = match &a.acceptance {
        Acceptance::Reachability(f) => {
            let (stem, cyc) = deterministic_lasso(a, &choice, q);
            trace.iter().chain(&stem).chain(&cyc).any(|p| f.contains(p))
        }
        Acceptance::Buchi(f) => cycle.iter().any(|p| f.contains(p)),
        Acceptance::Parity(sets) => cycle_wins(&colours(a.len(), sets), &cycle),
        Acceptance::GeneralizedBuchi(sets) => sets.iter().all(|f| cycle.iter().any(|p| f.contains(p))),
    };
    let seed = match adversary {
        Adversary::Random { seed, .. } => Some(*seed),
        _ => None,
    };
    Ok(SimRun { trace, faults, limit_cycle: cycle, accepted, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::running_example;

    #[test]
    fn running_buchi_bound_is_two() {
        let a = running_example(true);
        let s = Strategy::uniform(&a, 0);
        let b = compute_fault_bound(&a, &s).unwrap();
        assert_eq!(b.n, Some(2));
        let mut f: Vec<usize> = b.lengths.iter().map(|t| t.state).collect();
        f.sort();
        assert_eq!(f, vec![5, 6]);
        assert!(b.pedigree && b.certified);
        let out = exhaustive_adversary_search(&a, &s, 2, DEFAULT_SEARCH_CAP).unwrap();
        assert!(out.violation.is_none());
    }

    #[test]
    fn nominal_and_scripted_runs() {
        let a = running_example(false);
        let s = Strategy::uniform(&a, 0);
        let r = simulate_run(&a, &s, &Adversary::Nominal, 10).unwrap();
        assert_eq!(r.trace, vec![0, 3, 5, 6]);
        assert!(r.accepted);
        let r = simulate_run(&a, &s, &Adversary::Scripted { faults: vec![(1, 4)], n_bound: 0 }, 10).unwrap();
        assert_eq!(r.trace, vec![0, 4, 6]);
        assert_eq!(r.faults, vec![1]);
    }

    #[test]
    fn script_spacing_is_enforced() {
        let a = running_example(true);
        let s = Strategy::uniform(&a, 0);
        let bad = Adversary::Scripted { faults: vec![(1, 4), (2, 6)], n_bound: 2 };
        assert!(matches!(simulate_run(&a, &s, &bad, 5), Err(AnalysisError::Script(_))));
        let off = Adversary::Scripted { faults: vec![(1, 2)], n_bound: 0 };
        assert!(matches!(simulate_run(&a, &s, &off, 5), Err(AnalysisError::Script(_))));
    }

    #[test]
    fn seeded_runs_replay() {
        let a = running_example(true);
        let s = Strategy::uniform(&a, 0);
        let adv = Adversary::Random { seed: 7, n_bound: 1 };
        assert_eq!(simulate_run(&a, &s, &adv, 40).unwrap(), simulate_run(&a, &s, &adv, 40).unwrap());
    }
}
