//! Parity robustness: lexicographic fixpoints over the even colours, the progress
//! relation ⊳, Q̄, the progress-restricted automaton and deterministic synthesis.

use std::cmp::Ordering;

use crate::error::{AnalysisError, Witness};
use crate::fixpoint::minmax_fixpoint;
use crate::graph::{bfs, on_cycle_within};
use crate::model::{check_coreachability, Acceptance, Allowed, InputId, MetricAutomaton, StateId, Strategy, Transition};
use crate::nominal::deterministic_lasso;
use crate::num::ExtNonNeg;
use crate::robustness::{sigma_from_raw, OptTable, RobustnessReport};

/// One entry per even colour: `(d(q,F₀), d(q,F₂), …)`.
pub type ParityVector = Vec<ExtNonNeg>;

pub fn parity_sets(a: &MetricAutomaton) -> Result<Vec<Vec<StateId>>, AnalysisError> {
    match &a.acceptance {
        Acceptance::Parity(s) => Ok(s.clone()),
        _ => Err(AnalysisError::Unsupported("not a parity automaton".into())),
    }
}

pub fn even_sets(sets: &[Vec<StateId>]) -> Vec<Vec<StateId>> {
    sets.iter().step_by(2).cloned().collect()
}

pub fn colours(n: usize, sets: &[Vec<StateId>]) -> Vec<Option<usize>> {
    Acceptance::Parity(sets.to_vec()).colours(n)
}

pub fn distance_vectors(a: &MetricAutomaton, sets: &[Vec<StateId>]) -> Vec<ParityVector> {
    let cols: Vec<Vec<ExtNonNeg>> = even_sets(sets).iter().map(|f| a.distances_to_set(f)).collect();
    (0..a.len()).map(|q| cols.iter().map(|c| c[q].clone()).collect()).collect()
}

/// Lexicographic comparison of the first `len` components.
pub fn prefix_cmp(a: &[ExtNonNeg], b: &[ExtNonNeg], len: usize) -> Ordering {
    a[..len].cmp(&b[..len])
}

/// The components a state of colour `c` is compared on, and whether the comparison is strict.
/// Colour `2i` compares the components below `i` non-strictly, colour `2i+1` compares
/// components `0..=i` strictly, and an uncoloured state compares everything strictly.
pub fn obligation(colour: Option<usize>, components: usize) -> (usize, bool) {
    match colour {
        None => (components, true),
        Some(j) if j % 2 == 0 => ((j / 2).min(components), false),
        Some(j) => ((j / 2 + 1).min(components), true),
    }
}

/// `a ⊳^q b` for a state of the given colour.
pub fn rhd(colour: Option<usize>, a: &[ExtNonNeg], b: &[ExtNonNeg]) -> bool {
    let (len, strict) = obligation(colour, a.len());
    match prefix_cmp(a, b, len) {
        Ordering::Greater => true,
        Ordering::Equal => !strict,
        Ordering::Less => false,
    }
}

/// Q̄: even states from which no state of lower or equal even colour can be reached
/// in one or more steps under any inputs and disturbances.
pub fn compute_qbar(a: &MetricAutomaton, sets: &[Vec<StateId>]) -> Vec<bool> {
    let n = a.len();
    let col = colours(n, sets);
    let succ = |q: usize| -> Vec<usize> {
        let mut v: Vec<usize> = a.enabled(q).into_iter().flat_map(|x| a.post_input(q, x).to_vec()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    (0..n)
        .map(|q| match col[q] {
            Some(j) if j % 2 == 0 => {
                let (_, seen) = bfs(n, &succ(q), &succ, &|_| true);
                !(0..n).any(|p| seen[p] && matches!(col[p], Some(c) if c % 2 == 0 && c <= j))
            }
            _ => false,
        })
        .collect()
}

/// Whether the lasso `stem · cycle^ω` satisfies ⊳ at every position of the cycle,
/// including the step that closes it. Failures on the stem are the finite exceptions.
pub fn progress_measure_holds(ranks: &[ParityVector], stem: &[StateId], cycle: &[StateId], sets: &[Vec<StateId>]) -> Result<bool, AnalysisError> {
    let _ = stem;
    if cycle.is_empty() {
        return Err(AnalysisError::Unsupported("malformed lasso: empty cycle".into()));
    }
    let col = colours(ranks.len(), sets);
    Ok((0..cycle.len()).all(|t| {
        let (q, p) = (cycle[t], cycle[(t + 1) % cycle.len()]);
        rhd(col[q], &ranks[q], &ranks[p])
    }))
}

/// Whether the least colour on a cycle is even. A cycle without colours loses.
pub fn cycle_wins(colours: &[Option<usize>], cycle: &[StateId]) -> bool {
    matches!(cycle.iter().filter_map(|&q| colours[q]).min(), Some(c) if c % 2 == 0)
}

/// Smallest `r` such that every cycle reachable under `allowed` with disturbances is
/// won once each even set `F_2i` is widened to `{q : d(q, F_2i) ≤ r}`. `∞` when a
/// reachable state has no successor or no radius suffices.
pub fn parity_recurrence_raw(a: &MetricAutomaton, allowed: &Allowed, sets: &[Vec<StateId>]) -> ExtNonNeg {
    let n = a.len();
    let succ = |q: usize| {
        let mut v: Vec<StateId> = allowed[q].iter().flat_map(|&x| a.post_input(q, x).iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (_, seen) = bfs(n, &[a.initial], &succ, &|_| true);
    if (0..n).any(|q| seen[q] && succ(q).is_empty()) {
        return ExtNonNeg::Inf;
    }
    let base = colours(n, sets);
    let dists: Vec<(usize, Vec<ExtNonNeg>)> =
        sets.iter().enumerate().step_by(2).map(|(j, f)| (j, a.distances_to_set(f))).collect();
    let mut levels: Vec<ExtNonNeg> =
        dists.iter().flat_map(|(_, d)| (0..n).filter(|&q| seen[q]).map(|q| d[q].clone())).filter(|r| !r.is_inf()).chain([ExtNonNeg::zero()]).collect();
    levels.sort();
    levels.dedup();
    for r in levels {
        let col: Vec<Option<usize>> = (0..n)
            .map(|q| {
                let widened = dists.iter().filter(|(_, d)| d[q] <= r).map(|&(j, _)| j).min();
                match (base[q], widened) {
                    (Some(c), Some(w)) => Some(c.min(w)),
                    (c, w) => c.or(w),
                }
            })
            .collect();
        let loses = |j: Option<usize>| {
            let mask: Vec<bool> = (0..n).map(|q| seen[q] && col[q].map_or(true, |c| j.is_some_and(|j| c >= j))).collect();
            on_cycle_within(n, &succ, &mask).iter().enumerate().any(|(q, &on)| on && col[q] == j)
        };
        if !loses(None) && !(1..sets.len()).step_by(2).any(|j| loses(Some(j))) {
            return r;
        }
    }
    ExtNonNeg::Inf
}

fn assumption(a: &MetricAutomaton, sets: &[Vec<StateId>]) -> Result<(), AnalysisError> {
    let mut b = a.clone();
    b.acceptance = Acceptance::Parity(sets.to_vec());
    let r = check_coreachability(&b);
    if r.is_valid() {
        Ok(())
    } else {
        Err(AnalysisError::Assumption(r.violations))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityFixpoint {
    pub values: Vec<ParityVector>,
    pub iterations: usize,
}

pub fn parity_fixpoint_with(a: &MetricAutomaton, allowed: &Allowed, sets: &[Vec<StateId>]) -> ParityFixpoint {
    let run = minmax_fixpoint(a, allowed, distance_vectors(a, sets));
    ParityFixpoint { values: run.values, iterations: run.iterations }
}

pub fn parity_fixpoint(a: &MetricAutomaton, sets: &[Vec<StateId>]) -> Result<ParityFixpoint, AnalysisError> {
    assumption(a, sets)?;
    Ok(parity_fixpoint_with(a, &a.all_allowed(), sets))
}

/// A|_⊳ with the same states; pruned states have no input left.
#[derive(Debug, Clone)]
pub struct ProgressRestriction {
    pub automaton: MetricAutomaton,
    pub allowed: Allowed,
    pub pruned: Vec<StateId>,
}

/// Keeps input `x` at `q` iff `d(q,𝓕) ⊳^q d(δ(q,x,ε),𝓕)`.
pub fn restrict_by_progress(a: &MetricAutomaton, sets: &[Vec<StateId>]) -> ProgressRestriction {
    let n = a.len();
    let col = colours(n, sets);
    let d = distance_vectors(a, sets);
    let allowed: Allowed = (0..n)
        .map(|q| {
            a.enabled(q)
                .into_iter()
                .filter(|&x| rhd(col[q], &d[q], &d[a.nominal(q, x).expect("enabled")]))
                .collect()
        })
        .collect();
    let pruned = (0..n).filter(|&q| allowed[q].is_empty() && !a.enabled(q).is_empty()).collect();
    let transitions = (0..n)
        .flat_map(|q| {
            allowed[q].iter().map(move |&x| Transition {
                from: q,
                input: x,
                nominal: a.nominal(q, x).expect("enabled"),
                disturbed: Some(a.post_input(q, x).to_vec()),
            })
        })
        .collect();
    let automaton = MetricAutomaton::new(
        a.states.clone(),
        a.metric.clone(),
        a.initial,
        a.inputs.clone(),
        transitions,
        a.gamma.clone(),
        Acceptance::Parity(sets.to_vec()),
    )
    .expect("restriction of a well-formed automaton");
    ProgressRestriction { automaton, allowed, pruned }
}

/// The nominal lasso of a deterministic strategy, if it loses.
pub fn parity_nominal_violation(a: &MetricAutomaton, choice: &[Option<InputId>], sets: &[Vec<StateId>]) -> Option<Witness> {
    let (stem, cycle) = deterministic_lasso(a, choice, a.initial);
    if cycle.is_empty() || !cycle_wins(&colours(a.len(), sets), &cycle) {
        Some(Witness { stem, cycle })
    } else {
        None
    }
}

/// The separation condition: no coloured state outside `F₂ᵢ` lies in the inflated `F′₂ᵢ`.
pub fn separation_holds(a: &MetricAutomaton, sets: &[Vec<StateId>], inflated: &[Vec<StateId>]) -> bool {
    let col = colours(a.len(), sets);
    let evens = even_sets(sets);
    let covers_all = col.iter().all(|c| c.is_some());
    let grows = evens.iter().zip(inflated).any(|(f, g)| g.iter().any(|q| !f.contains(q)));
    if covers_all && grows {
        return false;
    }
    evens
        .iter()
        .zip(inflated)
        .all(|(f, g)| g.iter().all(|q| f.contains(q) || col[*q].is_none()))
}

fn deterministic_choices(a: &MetricAutomaton, s: &Strategy) -> Result<Vec<Option<InputId>>, AnalysisError> {
    s.check_against(a)?;
    let c = s
        .memoryless()
        .ok_or_else(|| AnalysisError::Unsupported("parity verification needs a memoryless strategy".into()))?;
    if !s.is_deterministic() {
        return Err(AnalysisError::Unsupported("parity strategies must be deterministic".into()));
    }
    Ok(c.iter().map(|v| v.first().copied()).collect())
}

fn max_component(v: &[ExtNonNeg]) -> ExtNonNeg {
    v.iter().max().cloned().unwrap_or_else(ExtNonNeg::zero)
}

fn min_component(v: &[ExtNonNeg]) -> ExtNonNeg {
    v.iter().min().cloned().unwrap_or_else(ExtNonNeg::zero)
}

/// σ = max_k opt*(q₀,k)/γ̄ on A|_S, certified only when the separation condition holds.
pub fn verify_parity_sigma(a: &MetricAutomaton, s: &Strategy) -> Result<RobustnessReport, AnalysisError> {
    let sets = parity_sets(a)?;
    let choice = deterministic_choices(a, s)?;
    if let Some(w) = parity_nominal_violation(a, &choice, &sets) {
        return Err(AnalysisError::NotNominallyWinning(w));
    }
    let allowed = s.memoryless().expect("checked").clone();
    let fp = parity_fixpoint_with(a, &allowed, &sets);
    let at0 = fp.values[a.initial].clone();
    let evens = even_sets(&sets);
    let mut rep = RobustnessReport::new(a, "parity", max_component(&at0), &evens, OptTable::Parity(fp.values), fp.iterations);
    rep.sigma_min_components = Some(sigma_from_raw(&min_component(&at0), &rep.gamma_bar).0);
    rep.certified = separation_holds(a, &sets, &rep.inflated);
    if !rep.certified {
        rep.notes.push("even sets are not separated at this σ; bound is uncertified".into());
    }
    rep.strategy = Some(s.clone());
    Ok(rep)
}

/// Lexicographically least value at the nominal successor among `inputs`, ties by declaration order.
fn lex_min_choice(a: &MetricAutomaton, values: &[ParityVector], q: StateId, inputs: &[InputId]) -> Option<InputId> {
    inputs
        .iter()
        .copied()
        .min_by(|&x, &y| {
            let vx = &values[a.nominal(q, x).expect("enabled")];
            let vy = &values[a.nominal(q, y).expect("enabled")];
            vx.cmp(vy).then(x.cmp(&y))
        })
}

pub fn synthesize_parity(a: &MetricAutomaton) -> Result<RobustnessReport, AnalysisError> {
    let sets = parity_sets(a)?;
    assumption(a, &sets)?;
    let n = a.len();
    let qbar = compute_qbar(a, &sets);
    let restricted = restrict_by_progress(a, &sets);
    let fp = parity_fixpoint_with(a, &restricted.allowed, &sets);
    let choice: Vec<Option<InputId>> = (0..n)
        .map(|q| {
            if qbar[q] {
                a.enabled(q).first().copied()
            } else {
                lex_min_choice(a, &fp.values, q, &restricted.allowed[q])
            }
        })
        .collect();
    let chosen: Allowed = choice.iter().map(|c| c.iter().copied().collect()).collect();
    let reach = a.reachable_from(a.initial, &chosen);
    if let Some(q) = (0..n).find(|&q| reach[q] && choice[q].is_none() && !a.enabled(q).is_empty()) {
        return Err(AnalysisError::NoValidInput(q));
    }
    let at0 = fp.values[a.initial].clone();
    let evens = even_sets(&sets);
    let mut rep = RobustnessReport::new(a, "parity", max_component(&at0), &evens, OptTable::Parity(fp.values.clone()), fp.iterations);
    rep.sigma_min_components = Some(sigma_from_raw(&min_component(&at0), &rep.gamma_bar).0);
    rep.certified = separation_holds(a, &sets, &rep.inflated);
    for &q in &restricted.pruned {
        rep.notes.push(format!("state `{}` has no input satisfying the progress measure", a.name(q)));
    }
    let strategy = Strategy::from_choices(&choice);
    match verify_parity_sigma(a, &strategy) {
        Ok(v) => {
            rep.strategy_sigma = Some(v.sigma);
            rep.certified &= v.certified;
        }
        Err(AnalysisError::NotNominallyWinning(w)) => {
            rep.certified = false;
            rep.notes.push(format!("induced strategy is not nominally winning: {}", w.describe(a)));
        }
        Err(e) => return Err(e),
    }
    if !rep.certified {
        rep.notes.push("bound is uncertified".into());
    }
    rep.strategy = Some(strategy);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::running_example;
    use crate::num::ExtNonNeg as E;

    fn v(x: &[i64]) -> Vec<E> {
        x.iter().map(|&k| if k < 0 { E::Inf } else { E::int(k) }).collect()
    }

    fn running_parity() -> MetricAutomaton {
        let mut a = running_example(true);
        a.acceptance = Acceptance::Parity(vec![vec![6]]);
        a
    }

    #[test]
    fn rhd_cases() {
        // F0 keeps anything, F1 needs a strict drop in component 0
        assert!(rhd(Some(0), &v(&[1, 1]), &v(&[5, 5])));
        assert!(!rhd(Some(1), &v(&[1, 1]), &v(&[1, 0])));
        assert!(rhd(Some(1), &v(&[2, 9]), &v(&[1, 9])));
        assert!(rhd(Some(2), &v(&[1, 4]), &v(&[1, 9])));
        assert!(!rhd(None, &v(&[1, 4]), &v(&[1, 4])));
        assert!(rhd(None, &v(&[-1, 4]), &v(&[3, 4])));
    }

    #[test]
    fn qbar_examples() {
        let a = running_parity();
        // q6 leads back to q6
        assert!(compute_qbar(&a, &[vec![6]]).iter().all(|b| !b));
        let r = running_example(false);
        let q = compute_qbar(&r, &[vec![6]]);
        assert_eq!(q, vec![false, false, false, false, false, false, true]);
    }

    #[test]
    fn n_zero_matches_reachability() {
        let a = running_parity();
        let fp = parity_fixpoint(&a, &[vec![6]]).unwrap();
        let reach = crate::reach::fixpoint_opt(&a, &[6]);
        let flat: Vec<E> = fp.values.iter().map(|x| x[0].clone()).collect();
        assert_eq!(flat, reach.values);
        let r = synthesize_parity(&a).unwrap();
        let b = crate::reach::synthesize(&running_example(true)).unwrap();
        assert_eq!(r.sigma, b.sigma);
    }

    #[test]
    fn running_sa_is_certified() {
        let a = running_parity();
        let rep = verify_parity_sigma(&a, &Strategy::uniform(&a, 0)).unwrap();
        assert_eq!(rep.sigma, E::int(1));
        assert!(rep.certified);
    }

    #[test]
    fn restriction_in_f0_keeps_everything() {
        let a = running_parity();
        let r = restrict_by_progress(&a, &[vec![6]]);
        assert_eq!(r.allowed[6], vec![0, 1]);
        assert_eq!(r.allowed[0], vec![0]);
        assert!(r.pruned.is_empty());
    }

    #[test]
    fn progress_measure_lassos() {
        let sets = vec![vec![0], vec![1]];
        let ranks = vec![v(&[0]), v(&[1])];
        assert!(progress_measure_holds(&ranks, &[], &[0], &sets).unwrap());
        assert!(progress_measure_holds(&ranks, &[], &[0, 1], &sets).unwrap());
        assert!(!progress_measure_holds(&ranks, &[0], &[1], &sets).unwrap());
        assert!(progress_measure_holds(&ranks, &[], &[], &sets).is_err());
    }
}
