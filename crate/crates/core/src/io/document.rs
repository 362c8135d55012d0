//! The JSON automaton document, with exact rationals written as decimal strings.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::model::{validate_automaton, Acceptance, Gamma, Metric, MetricAutomaton, State, StateId, Transition};
use crate::num::{format_rat, parse_rat, ExtNonNeg, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    pub states: Vec<StateDoc>,
    pub metric: MetricDoc,
    pub initial: String,
    pub inputs: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
    pub gamma: GammaDoc,
    pub acceptance: AcceptanceDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Explicit,
    Hamming,
    Manhattan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    pub kind: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub input: String,
    pub nominal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbed: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_state: Option<IndexMap<String, String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptanceKind {
    Reachability,
    Buchi,
    GeneralizedBuchi,
    Parity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceDoc {
    pub kind: AcceptanceKind,
    /// For parity, entry `j` lists the states of colour `j`.
    pub sets: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocError {
    Syntax { line: usize, column: usize, message: String },
    Schema { path: String, message: String },
    /// Validation findings, one line each.
    Invalid(Vec<String>),
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocError::Syntax { line, column, message } => write!(f, "syntax error at line {line}, column {column}: {message}"),
            DocError::Schema { path, message } => write!(f, "schema error at `{path}`: {message}"),
            DocError::Invalid(v) => {
                writeln!(f, "automaton is invalid:")?;
                for m in v {
                    writeln!(f, "  - {m}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for DocError {}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DocError {
    DocError::Schema { path: path.into(), message: message.into() }
}

/// Deserializes JSON into `T`, reporting syntax errors by position and type errors by path.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, DocError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            DocError::Syntax { line: inner.line(), column: inner.column(), message: inner.to_string() }
        } else {
            schema(path, inner.to_string())
        }
    })
}

fn parse_ext(s: &str, path: &str) -> Result<ExtNonNeg, DocError> {
    s.parse().map_err(|_| schema(path, format!("`{s}` is not a non-negative number or `inf`")))
}

fn parse_nonneg(s: &str, path: &str) -> Result<Rat, DocError> {
    match parse_rat(s) {
        Ok(r) if r >= Rat::from_integer(0.into()) => Ok(r),
        _ => Err(schema(path, format!("`{s}` is not a non-negative number"))),
    }
}

impl AutomatonDocument {
    pub fn from_automaton(a: &MetricAutomaton) -> Self {
        let name = |q: StateId| a.name(q).to_string();
        let metric = match &a.metric {
            Metric::Explicit(m) => MetricDoc {
                kind: MetricKind::Explicit,
                matrix: Some(m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()),
            },
            Metric::Hamming => MetricDoc { kind: MetricKind::Hamming, matrix: None },
            Metric::Manhattan => MetricDoc { kind: MetricKind::Manhattan, matrix: None },
        };
        let gamma = match &a.gamma {
            Gamma::Constant(g) => GammaDoc { constant: Some(format_rat(g)), per_state: None },
            Gamma::PerState(v) => GammaDoc {
                constant: None,
                per_state: Some(v.iter().enumerate().map(|(q, g)| (name(q), format_rat(g))).collect()),
            },
        };
        let (kind, sets) = match &a.acceptance {
            Acceptance::Reachability(f) => (AcceptanceKind::Reachability, vec![f.clone()]),
            Acceptance::Buchi(f) => (AcceptanceKind::Buchi, vec![f.clone()]),
            Acceptance::GeneralizedBuchi(s) => (AcceptanceKind::GeneralizedBuchi, s.clone()),
            Acceptance::Parity(s) => (AcceptanceKind::Parity, s.clone()),
        };
        AutomatonDocument {
            states: a.states.iter().map(|s| StateDoc { name: s.name.clone(), coords: s.coords.clone() }).collect(),
            metric,
            initial: name(a.initial),
            inputs: a.inputs.clone(),
            transitions: a
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: name(t.from),
                    input: a.inputs[t.input].clone(),
                    nominal: name(t.nominal),
                    disturbed: t.disturbed.as_ref().map(|d| d.iter().map(|&q| name(q)).collect()),
                })
                .collect(),
            gamma,
            acceptance: AcceptanceDoc { kind, sets: sets.into_iter().map(|s| s.into_iter().map(name).collect()).collect() },
        }
    }

    /// Builds the automaton without checking the metric axioms or the γ-bound.
    pub fn to_automaton(&self) -> Result<MetricAutomaton, DocError> {
        if self.states.is_empty() {
            return Err(schema("states", "at least one state is required"));
        }
        let mut index = std::collections::HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if s.name.is_empty() {
                return Err(schema(format!("states[{i}].name"), "state names must be non-empty"));
            }
            if index.insert(s.name.as_str(), i).is_some() {
                return Err(schema(format!("states[{i}].name"), format!("duplicate state `{}`", s.name)));
            }
        }
        let state = |n: &str, path: String| -> Result<StateId, DocError> {
            index.get(n).copied().ok_or_else(|| schema(path, format!("unknown state `{n}`")))
        };
        let input = |n: &str, path: String| -> Result<usize, DocError> {
            self.inputs.iter().position(|x| x == n).ok_or_else(|| schema(path, format!("unknown input `{n}`")))
        };
        let metric = match self.metric.kind {
            MetricKind::Explicit => {
                let m = self.metric.matrix.as_ref().ok_or_else(|| schema("metric.matrix", "explicit metric needs a matrix"))?;
                if m.len() != self.states.len() {
                    return Err(schema("metric.matrix", format!("expected {} rows", self.states.len())));
                }
                let mut rows = Vec::new();
                for (i, r) in m.iter().enumerate() {
                    if r.len() != self.states.len() {
                        return Err(schema(format!("metric.matrix[{i}]"), format!("expected {} entries", self.states.len())));
                    }
                    rows.push(
                        r.iter()
                            .enumerate()
                            .map(|(j, x)| parse_ext(x, &format!("metric.matrix[{i}][{j}]")))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                Metric::Explicit(rows)
            }
            MetricKind::Hamming => Metric::Hamming,
            MetricKind::Manhattan => Metric::Manhattan,
        };
        if self.metric.kind != MetricKind::Explicit && self.metric.matrix.is_some() {
            return Err(schema("metric.matrix", "only explicit metrics take a matrix"));
        }
        let initial = state(&self.initial, "initial".into())?;
        let mut transitions = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let p = |f: &str| format!("transitions[{i}].{f}");
            transitions.push(Transition {
                from: state(&t.from, p("from"))?,
                input: input(&t.input, p("input"))?,
                nominal: state(&t.nominal, p("nominal"))?,
                disturbed: match &t.disturbed {
                    None => None,
                    Some(d) => Some(
                        d.iter()
                            .enumerate()
                            .map(|(j, n)| state(n, format!("transitions[{i}].disturbed[{j}]")))
                            .collect::<Result<Vec<_>, _>>()?,
                    ),
                },
            });
        }
        let gamma = match (&self.gamma.constant, &self.gamma.per_state) {
            (Some(c), None) => Gamma::Constant(parse_nonneg(c, "gamma.constant")?),
            (None, Some(m)) => {
                let mut v = vec![None; self.states.len()];
                for (n, g) in m {
                    let q = state(n, format!("gamma.per_state.{n}"))?;
                    v[q] = Some(parse_nonneg(g, &format!("gamma.per_state.{n}"))?);
                }
                if let Some(q) = v.iter().position(|g| g.is_none()) {
                    return Err(schema("gamma.per_state", format!("missing state `{}`", self.states[q].name)));
                }
                Gamma::PerState(v.into_iter().map(|g| g.expect("checked")).collect())
            }
            _ => return Err(schema("gamma", "exactly one of `constant` and `per_state` is required")),
        };
        let mut sets = Vec::new();
        for (i, s) in self.acceptance.sets.iter().enumerate() {
            sets.push(
                s.iter()
                    .enumerate()
                    .map(|(j, n)| state(n, format!("acceptance.sets[{i}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let single = |sets: Vec<Vec<StateId>>| -> Result<Vec<StateId>, DocError> {
            match <[Vec<StateId>; 1]>::try_from(sets) {
                Ok([f]) => Ok(f),
                Err(_) => Err(schema("acceptance.sets", "this objective takes exactly one set")),
            }
        };
        if sets.is_empty() {
            return Err(schema("acceptance.sets", "at least one set is required"));
        }
        let acceptance = match self.acceptance.kind {
            AcceptanceKind::Reachability => Acceptance::Reachability(single(sets)?),
            AcceptanceKind::Buchi => Acceptance::Buchi(single(sets)?),
            AcceptanceKind::GeneralizedBuchi => Acceptance::GeneralizedBuchi(sets),
            AcceptanceKind::Parity => Acceptance::Parity(sets),
        };
        let states = self.states.iter().map(|s| State { name: s.name.clone(), coords: s.coords.clone() }).collect();
        MetricAutomaton::new(states, metric, initial, self.inputs.clone(), transitions, gamma, acceptance)
            .map_err(|e| schema("", e.to_string()))
    }
}

/// Parses without validating the metric axioms, the γ-bound or reachability.
pub fn parse_document_unvalidated(text: &str) -> Result<MetricAutomaton, DocError> {
    from_json::<AutomatonDocument>(text)?.to_automaton()
}

/// Parses and validates.
pub fn parse_document(text: &str) -> Result<MetricAutomaton, DocError> {
    let a = parse_document_unvalidated(text)?;
    let report = validate_automaton(&a);
    let errors: Vec<String> = report.errors().map(|v| v.describe(&a)).collect();
    if errors.is_empty() {
        Ok(a)
    } else {
        Err(DocError::Invalid(errors))
    }
}

/// Canonical text: pretty JSON with a trailing newline.
pub fn serialize_document(a: &MetricAutomaton) -> String {
    let mut s = serde_json::to_string_pretty(&AutomatonDocument::from_automaton(a)).expect("document serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{gray_code, running_example};

    #[test]
    fn round_trip_is_byte_exact() {
        for a in [running_example(false), running_example(true), gray_code(3).unwrap()] {
            let text = serialize_document(&a);
            let b = parse_document(&text).unwrap();
            assert_eq!(serialize_document(&b), text);
        }
    }

    #[test]
    fn empty_states_is_a_schema_error() {
        let mut doc = AutomatonDocument::from_automaton(&running_example(false));
        doc.states.clear();
        assert!(matches!(doc.to_automaton(), Err(DocError::Schema { .. })));
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_document("{\n  \"states\": [\n").unwrap_err();
        assert!(matches!(e, DocError::Syntax { line: 3, .. }), "{e}");
        let text = serialize_document(&running_example(false)).replacen("\"nominal\": \"q3\"", "\"nominal\": \"q9\"", 1);
        match parse_document(&text).unwrap_err() {
            DocError::Schema { path, .. } => assert_eq!(path, "transitions[0].nominal"),
            other => panic!("{other}"),
        }
        let text = serialize_document(&running_example(false)).replacen("\"initial\": \"q0\"", "\"initial\": 3", 1);
        match parse_document(&text).unwrap_err() {
            DocError::Schema { path, .. } => assert_eq!(path, "initial"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_disturbed_means_ball() {
        let a = parse_document(&serialize_document(&running_example(false))).unwrap();
        assert_eq!(a.post_input(0, 0), &[3, 4]);
    }

    #[test]
    fn decimal_entries_are_exact() {
        let text = serialize_document(&running_example(false)).replacen("\"constant\": \"1\"", "\"constant\": \"2.5\"", 1);
        let a = parse_document_unvalidated(&text).unwrap();
        assert_eq!(a.gamma_bar(), crate::num::ratio(5, 2));
    }
}
