use crate::model::{MetricAutomaton, ModelError, StateId, Violation};

/// A finite path, optionally closed into a lasso by `cycle`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    pub stem: Vec<StateId>,
    /// Empty when the path ends in a dead end.
    pub cycle: Vec<StateId>,
}

impl Witness {
    pub fn describe(&self, a: &MetricAutomaton) -> String {
        let names = |v: &[StateId]| v.iter().map(|&q| a.name(q)).collect::<Vec<_>>().join(" ");
        if self.cycle.is_empty() {
            format!("dead end after {}", names(&self.stem))
        } else {
            format!("{} ({})^ω", names(&self.stem), names(&self.cycle))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("strategy is not nominally winning")]
    NotNominallyWinning(Witness),
    #[error("coreachability assumption violated")]
    Assumption(Vec<Violation>),
    #[error("no valid input at state {0}")]
    NoValidInput(StateId),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("automaton has {size} states, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("invalid fault script: {0}")]
    Script(String),
}

impl AnalysisError {
    pub fn describe(&self, a: &MetricAutomaton) -> String {
        match self {
            AnalysisError::NotNominallyWinning(w) => {
                format!("strategy is not nominally winning: {}", w.describe(a))
            }
            AnalysisError::Assumption(v) => format!(
                "coreachability assumption violated: {}",
                v.iter().map(|x| x.describe(a)).collect::<Vec<_>>().join("; ")
            ),
            AnalysisError::NoValidInput(q) => format!("no valid input at state {}", a.name(*q)),
            other => other.to_string(),
        }
    }
}
