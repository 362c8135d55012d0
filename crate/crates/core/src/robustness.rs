//! Robustness reports shared by the synthesis and verification modules.

use num_traits::Zero;

use crate::error::AnalysisError;
use crate::model::{Acceptance, MetricAutomaton, StateId, Strategy};
use crate::num::{ExtNonNeg, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptTable {
    /// `values[q]`.
    Scalar(Vec<ExtNonNeg>),
    /// `values[k][q]`, one column per target set.
    Matrix(Vec<Vec<ExtNonNeg>>),
    /// `values[q]` is a vector over the even colours.
    Parity(Vec<Vec<ExtNonNeg>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustnessReport {
    pub objective: &'static str,
    pub sigma: ExtNonNeg,
    /// σ·γ̄ before the division, i.e. the guaranteed distance itself.
    pub raw: ExtNonNeg,
    pub gamma_bar: Rat,
    /// Set when γ̄ = 0: disturbances cannot move the system at all.
    pub exact_win: bool,
    /// F′ for each target set.
    pub inflated: Vec<Vec<StateId>>,
    pub strategy: Option<Strategy>,
    pub opt: OptTable,
    pub iterations: usize,
    /// False when a parity bound fails the colour separation check.
    pub certified: bool,
    /// Parity only: the minimum over components.
    pub sigma_min_components: Option<ExtNonNeg>,
    /// Synthesis only: σ actually achieved by the returned strategy.
    pub strategy_sigma: Option<ExtNonNeg>,
    pub notes: Vec<String>,
}

/// Divides a guaranteed distance by γ̄; returns `(σ, exact_win)`.
pub fn sigma_from_raw(raw: &ExtNonNeg, gamma_bar: &Rat) -> (ExtNonNeg, bool) {
    if gamma_bar.is_zero() {
        (ExtNonNeg::zero(), true)
    } else {
        (raw.div(gamma_bar), false)
    }
}

/// `{q : d(q, F) ≤ σ·γ̄}` for each set.
pub fn inflate(a: &MetricAutomaton, sets: &[Vec<StateId>], sigma: &ExtNonNeg) -> Vec<Vec<StateId>> {
    let radius = sigma.scale(&a.gamma_bar());
    sets.iter()
        .map(|f| (0..a.len()).filter(|&q| a.distance_to_set(q, f) <= radius).collect())
        .collect()
}

impl RobustnessReport {
    pub(crate) fn new(
        a: &MetricAutomaton,
        objective: &'static str,
        raw: ExtNonNeg,
        sets: &[Vec<StateId>],
        opt: OptTable,
        iterations: usize,
    ) -> Self {
        let gamma_bar = a.gamma_bar();
        let (sigma, exact_win) = sigma_from_raw(&raw, &gamma_bar);
        let inflated = inflate(a, sets, &sigma);
        RobustnessReport {
            objective,
            sigma,
            raw,
            gamma_bar,
            exact_win,
            inflated,
            strategy: None,
            opt,
            iterations,
            certified: true,
            sigma_min_components: None,
            strategy_sigma: None,
            notes: Vec::new(),
        }
    }
}

/// Optimal synthesis for whichever objective `a` carries.
pub fn synthesize_for(a: &MetricAutomaton) -> Result<RobustnessReport, AnalysisError> {
    match &a.acceptance {
        Acceptance::Reachability(_) | Acceptance::Buchi(_) => crate::reach::synthesize(a),
        Acceptance::GeneralizedBuchi(_) => crate::genbuchi::synthesize_genbuchi(a),
        Acceptance::Parity(_) => crate::parity::synthesize_parity(a),
    }
}

/// Robustness of a given strategy for whichever objective `a` carries.
pub fn verify_for(a: &MetricAutomaton, s: &Strategy) -> Result<RobustnessReport, AnalysisError> {
    match &a.acceptance {
        Acceptance::Reachability(_) | Acceptance::Buchi(_) => crate::reach::verify(a, s),
        Acceptance::GeneralizedBuchi(_) => crate::genbuchi::verify_genbuchi_sigma(a, s),
        Acceptance::Parity(_) => crate::parity::verify_parity_sigma(a, s),
    }
}
