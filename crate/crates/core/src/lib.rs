//! Robustness analysis and strategy synthesis for metric automata under bounded disturbances.

pub mod certificates;
pub mod error;
pub mod fault;
pub mod fixpoint;
pub mod genbuchi;
pub mod graph;
pub mod io;
pub mod model;
pub mod nominal;
pub mod num;
pub mod parity;
pub mod reach;
pub mod robustness;

pub use error::{AnalysisError, Witness};
pub use model::{Acceptance, Gamma, Metric, MetricAutomaton, State, StateId, Strategy, Transition};
pub use num::{ExtNonNeg, Rat};
pub use robustness::RobustnessReport;
