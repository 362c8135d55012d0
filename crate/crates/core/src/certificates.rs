//! Control Lyapunov certificates: rank and decrease checks, Lipschitz constants,
//! σ bounds, construction from a winning strategy and strategy induction.
//!
//! Only linear `f(x) = c·x` and `η(x) = c·x` are supported.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::error::AnalysisError;
use crate::genbuchi::genbuchi_nominal_violation;
use crate::model::{check_coreachability, set_mask, Acceptance, Allowed, Gamma, InputId, MetricAutomaton, StateId, Strategy};
use crate::nominal::{buchi_violation, reach_violation};
use crate::num::{ExtNonNeg, Rat};
use crate::parity::{colours, compute_qbar, obligation, parity_nominal_violation, rhd, separation_holds};
use crate::robustness::inflate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertObjective {
    Reachability,
    Buchi,
    GeneralizedBuchi,
    Parity,
}

impl CertObjective {
    pub fn of(acc: &Acceptance) -> Self {
        match acc {
            Acceptance::Reachability(_) => CertObjective::Reachability,
            Acceptance::Buchi(_) => CertObjective::Buchi,
            Acceptance::GeneralizedBuchi(_) => CertObjective::GeneralizedBuchi,
            Acceptance::Parity(_) => CertObjective::Parity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CertObjective::Reachability => "reachability",
            CertObjective::Buchi => "buchi",
            CertObjective::GeneralizedBuchi => "generalized_buchi",
            CertObjective::Parity => "parity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub objective: CertObjective,
    /// `ranks[q]`: one entry for reachability and Büchi, one per set for generalized
    /// Büchi, one per even colour for parity.
    pub ranks: Vec<Vec<ExtNonNeg>>,
    /// `c` in `f(x) = c·x`.
    pub f_coeff: Rat,
    /// `c` in `η(x) = c·x` when the certificate was constructed from a strategy.
    pub eta_coeff: Option<Rat>,
}

impl RankCertificate {
    pub fn scalar(objective: CertObjective, ranks: Vec<ExtNonNeg>, f_coeff: Rat) -> Self {
        RankCertificate { objective, ranks: ranks.into_iter().map(|r| vec![r]).collect(), f_coeff, eta_coeff: None }
    }

    pub fn component(&self, k: usize) -> Vec<ExtNonNeg> {
        self.ranks.iter().map(|r| r[k].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertViolation {
    ZeroOffTarget { state: StateId, component: usize },
    NonZeroInTarget { state: StateId, component: usize },
    Infinite { state: StateId, component: usize },
    /// No input decreases the rank enough. `margin` is the best finite
    /// `R(q) − R(q^{aε}) − c·d(q,F)` over inputs, if any is finite.
    NoDecrease { state: StateId, component: usize, margin: Option<Rat> },
}

impl CertViolation {
    pub fn describe(&self, a: &MetricAutomaton) -> String {
        match self {
            CertViolation::ZeroOffTarget { state, component } => {
                format!("rank {component} is zero at `{}` outside its target set", a.name(*state))
            }
            CertViolation::NonZeroInTarget { state, component } => {
                format!("rank {component} is non-zero at `{}` inside its target set", a.name(*state))
            }
            CertViolation::Infinite { state, component } => {
                format!("rank {component} is infinite at `{}`", a.name(*state))
            }
            CertViolation::NoDecrease { state, component, margin } => match margin {
                Some(m) => format!(
                    "no input decreases rank {component} at `{}` (best margin {})",
                    a.name(*state),
                    crate::num::format_rat(m)
                ),
                None => format!("no input decreases rank {component} at `{}`", a.name(*state)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CertReport {
    pub violations: Vec<CertViolation>,
}

impl CertReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn target_sets(a: &MetricAutomaton, cert: &RankCertificate) -> Result<Vec<Vec<StateId>>, AnalysisError> {
    if CertObjective::of(&a.acceptance) != cert.objective {
        return Err(AnalysisError::Certificate(format!(
            "certificate is for {} but the automaton is {}",
            cert.objective.name(),
            a.acceptance.kind_name()
        )));
    }
    let sets = a.acceptance.target_sets();
    if cert.ranks.len() != a.len() || cert.ranks.iter().any(|r| r.len() != sets.len()) {
        return Err(AnalysisError::Certificate(format!(
            "certificate dimension mismatch: expected {} states with {} components",
            a.len(),
            sets.len()
        )));
    }
    if !cert.f_coeff.is_positive() {
        return Err(AnalysisError::Certificate("f coefficient must be positive".into()));
    }
    Ok(sets)
}

/// Zero exactly on the target sets (hence positive elsewhere); finite unless parity.
pub fn check_rank(a: &MetricAutomaton, cert: &RankCertificate) -> Result<CertReport, AnalysisError> {
    let sets = target_sets(a, cert)?;
    let mut v = Vec::new();
    for (k, f) in sets.iter().enumerate() {
        let mask = set_mask(a.len(), f);
        for q in 0..a.len() {
            let r = &cert.ranks[q][k];
            if r.is_inf() && cert.objective != CertObjective::Parity {
                v.push(CertViolation::Infinite { state: q, component: k });
            } else if mask[q] && !r.is_zero() {
                v.push(CertViolation::NonZeroInTarget { state: q, component: k });
            } else if !mask[q] && r.is_zero() {
                v.push(CertViolation::ZeroOffTarget { state: q, component: k });
            }
        }
    }
    Ok(CertReport { violations: v })
}

/// `R(q^{aε}) + c·d(q,F) ≤ R(q)`.
fn decreases(rq: &ExtNonNeg, rnext: &ExtNonNeg, c: &Rat, dist: &ExtNonNeg) -> bool {
    rnext.add(&dist.scale(c)) <= *rq
}

fn slack(rq: &ExtNonNeg, rnext: &ExtNonNeg, c: &Rat, dist: &ExtNonNeg) -> Option<Rat> {
    match (rq, rnext.add(&dist.scale(c))) {
        (ExtNonNeg::Fin(a), ExtNonNeg::Fin(b)) => Some(a - b),
        _ => None,
    }
}

/// Inputs at `q` satisfying the scalar decrease inequality for component `k`.
fn scalar_admissible(a: &MetricAutomaton, cert: &RankCertificate, k: usize, f: &[StateId], q: StateId) -> Vec<InputId> {
    let dist = a.distance_to_set(q, f);
    a.enabled(q)
        .into_iter()
        .filter(|&x| decreases(&cert.ranks[q][k], &cert.ranks[a.nominal(q, x).expect("enabled")][k], &cert.f_coeff, &dist))
        .collect()
}

/// Parity obligation at `q`: `R(q) ⊳^q R(q^{aε})`, and for odd or uncoloured states also
/// `R(q^{aε}) + c·d(q,𝓕) ⪯ R(q)` on the compared prefix.
fn parity_step_ok(colour: Option<usize>, rq: &[ExtNonNeg], rnext: &[ExtNonNeg], c: &Rat, dist: &[ExtNonNeg]) -> bool {
    if !rhd(colour, rq, rnext) {
        return false;
    }
    let (len, strict) = obligation(colour, rq.len());
    if !strict {
        return true;
    }
    let shifted: Vec<ExtNonNeg> = (0..len).map(|k| rnext[k].add(&dist[k].scale(c))).collect();
    shifted.as_slice().cmp(&rq[..len]) != Ordering::Greater
}

/// Inputs that satisfy the certificate's decrease obligation at `q`. Inside a target
/// set (reachability, Büchi, generalized Büchi per component) and on Q̄ every enabled
/// input is admissible. For generalized Büchi this is component `0`; use
/// [`admissible_inputs_component`] for the others.
pub fn admissible_inputs(a: &MetricAutomaton, cert: &RankCertificate, q: StateId) -> Result<Vec<InputId>, AnalysisError> {
    admissible_inputs_component(a, cert, q, 0)
}

pub fn admissible_inputs_component(a: &MetricAutomaton, cert: &RankCertificate, q: StateId, k: usize) -> Result<Vec<InputId>, AnalysisError> {
    let sets = target_sets(a, cert)?;
    match cert.objective {
        CertObjective::Parity => {
            let Acceptance::Parity(all) = &a.acceptance else { unreachable!() };
            if compute_qbar(a, all)[q] {
                return Ok(a.enabled(q));
            }
            let col = colours(a.len(), all);
            let dist: Vec<ExtNonNeg> = sets.iter().map(|f| a.distance_to_set(q, f)).collect();
            Ok(a.enabled(q)
                .into_iter()
                .filter(|&x| {
                    let p = a.nominal(q, x).expect("enabled");
                    parity_step_ok(col[q], &cert.ranks[q], &cert.ranks[p], &cert.f_coeff, &dist)
                })
                .collect())
        }
        _ => {
            if sets[k].contains(&q) {
                Ok(a.enabled(q))
            } else {
                Ok(scalar_admissible(a, cert, k, &sets[k], q))
            }
        }
    }
}

/// The decrease inequality at every state that needs it.
pub fn check_clf(a: &MetricAutomaton, cert: &RankCertificate) -> Result<CertReport, AnalysisError> {
    let mut rep = check_rank(a, cert)?;
    let sets = target_sets(a, cert)?;
    let n = a.len();
    match cert.objective {
        CertObjective::Parity => {
            let Acceptance::Parity(all) = &a.acceptance else { unreachable!() };
            let qbar = compute_qbar(a, all);
            for q in (0..n).filter(|&q| !qbar[q]) {
                if admissible_inputs(a, cert, q)?.is_empty() {
                    let col = colours(n, all)[q];
                    let (len, _) = obligation(col, sets.len());
                    rep.violations.push(CertViolation::NoDecrease { state: q, component: len.saturating_sub(1), margin: None });
                }
            }
        }
        _ => {
            for (k, f) in sets.iter().enumerate() {
                let mask = set_mask(n, f);
                for q in (0..n).filter(|&q| !mask[q]) {
                    if scalar_admissible(a, cert, k, f, q).is_empty() {
                        let dist = a.distance_to_set(q, f);
                        let margin = a
                            .enabled(q)
                            .into_iter()
                            .filter_map(|x| slack(&cert.ranks[q][k], &cert.ranks[a.nominal(q, x).expect("enabled")][k], &cert.f_coeff, &dist))
                            .max();
                        rep.violations.push(CertViolation::NoDecrease { state: q, component: k, margin });
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzResult {
    pub k: ExtNonNeg,
    /// `(p, q, component)` attaining the maximum.
    pub witness: Option<(StateId, StateId, usize)>,
}

/// Exact max over unordered pairs and components of `|R(p) − R(q)| / d(p,q)`.
/// Pairs at infinite distance and pairs of infinite ranks are skipped; a finite
/// rank paired with an infinite one gives `K = ∞`.
pub fn lipschitz_constant(a: &MetricAutomaton, cert: &RankCertificate) -> LipschitzResult {
    let n = a.len();
    let comps = cert.ranks.first().map_or(0, |r| r.len());
    let mut best = LipschitzResult { k: ExtNonNeg::zero(), witness: None };
    for k in 0..comps {
        for p in 0..n {
            for q in p + 1..n {
                let d = a.d(p, q);
                let Some(d) = d.finite() else { continue };
                let ratio = match (&cert.ranks[p][k], &cert.ranks[q][k]) {
                    (ExtNonNeg::Inf, ExtNonNeg::Inf) => continue,
                    (ExtNonNeg::Fin(x), ExtNonNeg::Fin(y)) => {
                        let diff = if x > y { x - y } else { y - x };
                        ExtNonNeg::from_rat(diff / d)
                    }
                    _ => ExtNonNeg::Inf,
                };
                if ratio > best.k || best.witness.is_none() && ratio == best.k {
                    best = LipschitzResult { k: ratio, witness: Some((p, q, k)) };
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaBound {
    pub sigma: ExtNonNeg,
    pub lipschitz: LipschitzResult,
    /// Parity only: whether the even sets stay separated at this σ.
    pub certified: bool,
}

/// σ = K/c. Needs a constant disturbance bound and a valid CLF.
pub fn sigma_bound_from_certificate(a: &MetricAutomaton, cert: &RankCertificate) -> Result<SigmaBound, AnalysisError> {
    if !matches!(a.gamma, Gamma::Constant(_)) {
        return Err(AnalysisError::Certificate(
            "certificate bounds need a constant disturbance bound; use the fixpoint verification for per-state bounds".into(),
        ));
    }
    let check = check_clf(a, cert)?;
    if !check.is_valid() {
        return Err(AnalysisError::Certificate(format!(
            "not a control Lyapunov function: {}",
            check.violations.iter().map(|v| v.describe(a)).collect::<Vec<_>>().join("; ")
        )));
    }
    let lipschitz = lipschitz_constant(a, cert);
    let sigma = lipschitz.k.div(&cert.f_coeff);
    let certified = match &a.acceptance {
        Acceptance::Parity(all) => {
            let inflated = inflate(a, &a.acceptance.target_sets(), &sigma);
            separation_holds(a, all, &inflated)
        }
        _ => true,
    };
    Ok(SigmaBound { sigma, lipschitz, certified })
}

/// Ranks for one target set from a set-valued strategy: on states from which every
/// nominal outcome of `allowed` reaches `f`, the largest `Σ η(d(·,F))` over those
/// outcomes; elsewhere the cheapest such sum over all inputs.
fn strategy_ranks(a: &MetricAutomaton, allowed: &Allowed, f: &[StateId], eta: &Rat) -> Vec<ExtNonNeg> {
    let n = a.len();
    let dist = a.distances_to_set(f);
    let weight = |q: StateId| dist[q].scale(eta);
    let mut rank: Vec<Option<ExtNonNeg>> = (0..n).map(|q| if f.contains(&q) { Some(ExtNonNeg::zero()) } else { None }).collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if rank[q].is_some() || allowed[q].is_empty() {
                continue;
            }
            let succ: Vec<Option<&ExtNonNeg>> = allowed[q]
                .iter()
                .map(|&x| rank[a.nominal(q, x).expect("enabled")].as_ref())
                .collect();
            if succ.iter().all(|s| s.is_some()) {
                let worst = succ.into_iter().map(|s| s.unwrap().clone()).max().expect("non-empty");
                rank[q] = Some(weight(q).add(&worst));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let fixed: Vec<bool> = rank.iter().map(|r| r.is_some()).collect();
    let mut out: Vec<ExtNonNeg> = rank.into_iter().map(|r| r.unwrap_or(ExtNonNeg::Inf)).collect();
    loop {
        let mut changed = false;
        for q in (0..n).filter(|&q| !fixed[q]) {
            let best = a.enabled(q).into_iter().map(|x| out[a.nominal(q, x).expect("enabled")].clone()).min();
            if let Some(b) = best {
                let cand = weight(q).add(&b);
                if cand < out[q] {
                    out[q] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    out
}

/// Parity ranks from a deterministic strategy: component `k` sums `η(d(·,F₂ₖ))` along
/// the nominal trace until it first meets `F₂ₖ`, and is ∞ if it never does.
fn parity_strategy_ranks(a: &MetricAutomaton, choice: &[Option<InputId>], evens: &[Vec<StateId>], eta: &Rat) -> Vec<Vec<ExtNonNeg>> {
    let n = a.len();
    let mut out = vec![Vec::with_capacity(evens.len()); n];
    for f in evens {
        let dist = a.distances_to_set(f);
        let mask = set_mask(n, f);
        for (q, row) in out.iter_mut().enumerate() {
            let mut seen = vec![false; n];
            let mut p = q;
            let mut sum = ExtNonNeg::zero();
            let value = loop {
                if mask[p] {
                    break sum;
                }
                if seen[p] {
                    break ExtNonNeg::Inf;
                }
                seen[p] = true;
                sum = sum.add(&dist[p].scale(eta));
                match choice[p].and_then(|x| a.nominal(p, x)) {
                    Some(next) => p = next,
                    None => break ExtNonNeg::Inf,
                }
            };
            row.push(value);
        }
    }
    out
}

fn coreachable(a: &MetricAutomaton) -> Result<(), AnalysisError> {
    let r = check_coreachability(a);
    if r.is_valid() {
        Ok(())
    } else {
        Err(AnalysisError::Assumption(r.violations))
    }
}

/// A CLF whose induced strategies contain `s`, with `f = η`.
pub fn construct_clf_from_strategy(a: &MetricAutomaton, s: &Strategy, eta_coeff: Rat) -> Result<RankCertificate, AnalysisError> {
    if eta_coeff <= Rat::zero() {
        return Err(AnalysisError::Certificate("η coefficient must be positive".into()));
    }
    s.check_against(a)?;
    let objective = CertObjective::of(&a.acceptance);
    let n = a.len();
    let ranks = match &a.acceptance {
        Acceptance::Reachability(f) | Acceptance::Buchi(f) => {
            coreachable(a)?;
            let allowed = s
                .memoryless()
                .ok_or_else(|| AnalysisError::Unsupported("construction needs a memoryless strategy".into()))?;
            let mask = set_mask(n, f);
            let w = if objective == CertObjective::Buchi {
                buchi_violation(a, allowed, &mask, &[a.initial])
            } else {
                reach_violation(a, allowed, &mask, &[a.initial])
            };
            if let Some(w) = w {
                return Err(AnalysisError::NotNominallyWinning(w));
            }
            strategy_ranks(a, allowed, f, &eta_coeff).into_iter().map(|r| vec![r]).collect()
        }
        Acceptance::GeneralizedBuchi(sets) => {
            coreachable(a)?;
            let Strategy::Indexed(c) = s else {
                return Err(AnalysisError::Unsupported("generalized Büchi needs an indexed strategy".into()));
            };
            if c.iter().any(|per| per.len() != sets.len()) {
                return Err(AnalysisError::Unsupported("indexed strategy has the wrong number of counters".into()));
            }
            if let Some(w) = genbuchi_nominal_violation(a, c, sets) {
                return Err(AnalysisError::NotNominallyWinning(w));
            }
            let cols: Vec<Vec<ExtNonNeg>> = sets
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let allowed: Allowed = c.iter().map(|per| per[k].clone()).collect();
                    strategy_ranks(a, &allowed, f, &eta_coeff)
                })
                .collect();
            (0..n).map(|q| cols.iter().map(|col| col[q].clone()).collect()).collect()
        }
        Acceptance::Parity(sets) => {
            if !s.is_deterministic() {
                return Err(AnalysisError::Unsupported("parity strategies must be deterministic".into()));
            }
            let allowed = s
                .memoryless()
                .ok_or_else(|| AnalysisError::Unsupported("construction needs a memoryless strategy".into()))?;
            let choice: Vec<Option<InputId>> = allowed.iter().map(|v| v.first().copied()).collect();
            if let Some(w) = parity_nominal_violation(a, &choice, sets) {
                return Err(AnalysisError::NotNominallyWinning(w));
            }
            parity_strategy_ranks(a, &choice, &a.acceptance.target_sets(), &eta_coeff)
        }
    };
    Ok(RankCertificate { objective, ranks, f_coeff: eta_coeff.clone(), eta_coeff: Some(eta_coeff) })
}

/// Strategy induced from a valid CLF. Reachability and Büchi: every admissible input.
/// Generalized Büchi: the same per counter value. Parity: the admissible input with
/// the lexicographically least successor rank, the first declared input on Q̄.
pub fn induce_strategy_from_clf(a: &MetricAutomaton, cert: &RankCertificate) -> Result<Strategy, AnalysisError> {
    let check = check_clf(a, cert)?;
    if !check.is_valid() {
        return Err(AnalysisError::Certificate(format!(
            "not a control Lyapunov function: {}",
            check.violations.iter().map(|v| v.describe(a)).collect::<Vec<_>>().join("; ")
        )));
    }
    let n = a.len();
    match cert.objective {
        CertObjective::Reachability | CertObjective::Buchi => Ok(Strategy::Memoryless(
            (0..n).map(|q| admissible_inputs(a, cert, q)).collect::<Result<_, _>>()?,
        )),
        CertObjective::GeneralizedBuchi => {
            let m = cert.ranks.first().map_or(0, |r| r.len());
            let mut out = Vec::with_capacity(n);
            for q in 0..n {
                out.push((0..m).map(|k| admissible_inputs_component(a, cert, q, k)).collect::<Result<Vec<_>, _>>()?);
            }
            Ok(Strategy::Indexed(out))
        }
        CertObjective::Parity => {
            let Acceptance::Parity(all) = &a.acceptance else { unreachable!() };
            let qbar = compute_qbar(a, all);
            let mut choice = Vec::with_capacity(n);
            for q in 0..n {
                if qbar[q] {
                    choice.push(a.enabled(q).first().copied());
                    continue;
                }
                let adm = admissible_inputs(a, cert, q)?;
                choice.push(adm.into_iter().min_by(|&x, &y| {
                    let rx = &cert.ranks[a.nominal(q, x).expect("enabled")];
                    let ry = &cert.ranks[a.nominal(q, y).expect("enabled")];
                    rx.cmp(ry).then(x.cmp(&y))
                }));
            }
            Ok(Strategy::from_choices(&choice))
        }
    }
}

/// Whether `s` is pointwise contained in the admissible sets of `cert` on `states`.
pub fn contained_in_induced(a: &MetricAutomaton, cert: &RankCertificate, s: &Strategy, states: &[StateId]) -> Result<Vec<StateId>, AnalysisError> {
    let mut bad = Vec::new();
    match s {
        Strategy::Memoryless(c) => {
            for &q in states {
                let adm = admissible_inputs(a, cert, q)?;
                if !c[q].iter().all(|x| adm.contains(x)) {
                    bad.push(q);
                }
            }
        }
        Strategy::Indexed(c) => {
            for &q in states {
                for (k, set) in c[q].iter().enumerate() {
                    let adm = admissible_inputs_component(a, cert, q, k)?;
                    if !set.iter().all(|x| adm.contains(x)) {
                        bad.push(q);
                        break;
                    }
                }
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::running_example;
    use crate::num::{rat, ratio};

    pub(crate) fn table3(col: &[i64]) -> Vec<ExtNonNeg> {
        col.iter().map(|&x| ExtNonNeg::int(x)).collect()
    }

    const RA: [i64; 7] = [18, 12, 24, 8, 6, 1, 0];
    const RB: [i64; 7] = [2, 1, 2, 2, 1, 1, 0];

    #[test]
    fn table3_ranks_are_valid() {
        let a = running_example(false);
        for col in [RA, RB] {
            let c = RankCertificate::scalar(CertObjective::Reachability, table3(&col), rat(1));
            assert!(check_rank(&a, &c).unwrap().is_valid());
        }
        let mut bad = RA;
        bad[5] = 0;
        let c = RankCertificate::scalar(CertObjective::Reachability, table3(&bad), rat(1));
        assert_eq!(check_rank(&a, &c).unwrap().violations, vec![CertViolation::ZeroOffTarget { state: 5, component: 0 }]);
    }

    #[test]
    fn ra_clf_depends_on_coefficient() {
        let a = running_example(false);
        let one = RankCertificate::scalar(CertObjective::Reachability, table3(&RA), rat(1));
        assert!(check_clf(&a, &one).unwrap().is_valid());
        let two = RankCertificate::scalar(CertObjective::Reachability, table3(&RA), rat(2));
        let v = check_clf(&a, &two).unwrap().violations;
        assert_eq!(v, vec![CertViolation::NoDecrease { state: 5, component: 0, margin: Some(rat(-1)) }]);
    }

    #[test]
    fn ra_lipschitz_and_bound() {
        let a = running_example(false);
        let c = RankCertificate::scalar(CertObjective::Reachability, table3(&RA), rat(1));
        let l = lipschitz_constant(&a, &c);
        assert_eq!(l.k, ExtNonNeg::int(12));
        assert_eq!(l.witness, Some((1, 2, 0)));
        assert_eq!(sigma_bound_from_certificate(&a, &c).unwrap().sigma, ExtNonNeg::int(12));
    }

    #[test]
    fn induced_strategies_contain_sa_and_sb() {
        let a = running_example(false);
        let ca = RankCertificate::scalar(CertObjective::Reachability, table3(&RA), rat(1));
        let sa = induce_strategy_from_clf(&a, &ca).unwrap();
        let trace = [0, 3, 5];
        for q in trace {
            assert!(sa.memoryless().unwrap()[q].contains(&0));
        }
        let cb = RankCertificate::scalar(CertObjective::Reachability, table3(&RB), ratio(1, 8));
        let sb = induce_strategy_from_clf(&a, &cb).unwrap();
        assert_eq!(sb.memoryless().unwrap()[0], vec![1]);
        assert!(sb.memoryless().unwrap()[1].contains(&1));
    }

    #[test]
    fn constructed_clf_round_trips() {
        let a = running_example(false);
        for x in [0, 1] {
            let s = Strategy::uniform(&a, x);
            let c = construct_clf_from_strategy(&a, &s, rat(1)).unwrap();
            assert!(check_clf(&a, &c).unwrap().is_valid());
            assert!(c.ranks[6][0].is_zero());
            let all: Vec<usize> = (0..7).collect();
            assert!(contained_in_induced(&a, &c, &s, &all).unwrap().is_empty());
        }
        let sa = construct_clf_from_strategy(&a, &Strategy::uniform(&a, 0), rat(1)).unwrap();
        let sb = construct_clf_from_strategy(&a, &Strategy::uniform(&a, 1), rat(1)).unwrap();
        let ka = sigma_bound_from_certificate(&a, &sa).unwrap().sigma;
        let kb = sigma_bound_from_certificate(&a, &sb).unwrap().sigma;
        assert!(kb > ka, "{kb} vs {ka}");
    }

    #[test]
    fn parity_n_zero_round_trip() {
        let mut a = running_example(true);
        a.acceptance = Acceptance::Parity(vec![vec![6]]);
        let s = Strategy::uniform(&a, 0);
        let c = construct_clf_from_strategy(&a, &s, rat(1)).unwrap();
        assert!(check_clf(&a, &c).unwrap().is_valid());
        let back = induce_strategy_from_clf(&a, &c).unwrap();
        for q in [0, 3, 5] {
            assert_eq!(back.choice(q), Some(0));
        }
    }

    #[test]
    fn genbuchi_max_rule() {
        let mut a = running_example(true);
        a.acceptance = Acceptance::GeneralizedBuchi(vec![vec![6], vec![3]]);
        let r = crate::genbuchi::synthesize_genbuchi(&a).unwrap();
        let c = construct_clf_from_strategy(&a, r.strategy.as_ref().unwrap(), rat(1)).unwrap();
        assert!(check_clf(&a, &c).unwrap().is_valid());
        let b = sigma_bound_from_certificate(&a, &c).unwrap();
        let k0 = lipschitz_constant(&a, &RankCertificate { ranks: c.ranks.iter().map(|r| vec![r[0].clone()]).collect(), objective: CertObjective::Reachability, ..c.clone() });
        assert!(b.lipschitz.k >= k0.k);
    }
}
