//! Strategy and certificate files. Both refer to states and inputs by name.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::certificates::{CertObjective, RankCertificate};
use crate::io::document::{from_json, AcceptanceKind, DocError};
use crate::model::{InputId, MetricAutomaton, Strategy};
use crate::num::{format_rat, parse_rat, ExtNonNeg, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyDoc {
    /// State name to chosen inputs; missing states choose nothing.
    Memoryless { choices: IndexMap<String, Vec<String>> },
    /// State name to chosen inputs per counter value.
    Indexed { choices: IndexMap<String, Vec<Vec<String>>> },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DocError {
    DocError::Schema { path: path.into(), message: message.into() }
}

fn inputs_of(a: &MetricAutomaton, names: &[String], path: &str) -> Result<Vec<InputId>, DocError> {
    let mut v = names
        .iter()
        .map(|n| a.input_id(n).ok_or_else(|| schema(path, format!("unknown input `{n}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

pub fn strategy_to_doc(a: &MetricAutomaton, s: &Strategy) -> StrategyDoc {
    let names = |v: &[InputId]| v.iter().map(|&x| a.inputs[x].clone()).collect::<Vec<_>>();
    match s {
        Strategy::Memoryless(c) => StrategyDoc::Memoryless {
            choices: c.iter().enumerate().map(|(q, v)| (a.name(q).to_string(), names(v))).collect(),
        },
        Strategy::Indexed(c) => StrategyDoc::Indexed {
            choices: c
                .iter()
                .enumerate()
                .map(|(q, per)| (a.name(q).to_string(), per.iter().map(|v| names(v)).collect()))
                .collect(),
        },
    }
}

pub fn serialize_strategy(a: &MetricAutomaton, s: &Strategy) -> String {
    let mut t = serde_json::to_string_pretty(&strategy_to_doc(a, s)).expect("strategy serializes");
    t.push('\n');
    t
}

pub fn parse_strategy(a: &MetricAutomaton, text: &str) -> Result<Strategy, DocError> {
    let state = |n: &str, path: String| a.state_id(n).ok_or_else(|| schema(path, format!("unknown state `{n}`")));
    let s = match from_json::<StrategyDoc>(text)? {
        StrategyDoc::Memoryless { choices } => {
            let mut c = vec![Vec::new(); a.len()];
            for (n, v) in &choices {
                let path = format!("choices.{n}");
                c[state(n, path.clone())?] = inputs_of(a, v, &path)?;
            }
            Strategy::Memoryless(c)
        }
        StrategyDoc::Indexed { choices } => {
            let width = choices.values().map(|v| v.len()).max().unwrap_or(0);
            let mut c = vec![vec![Vec::new(); width]; a.len()];
            for (n, per) in &choices {
                let q = state(n, format!("choices.{n}"))?;
                for (k, v) in per.iter().enumerate() {
                    c[q][k] = inputs_of(a, v, &format!("choices.{n}[{k}]"))?;
                }
            }
            Strategy::Indexed(c)
        }
    };
    s.check_against(a).map_err(|e| schema("choices", e.to_string()))?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub objective: AcceptanceKind,
    /// Coefficient `c` of `f(x) = c·x`.
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    /// State name to rank components.
    pub ranks: IndexMap<String, Vec<String>>,
}

fn kind_of(o: CertObjective) -> AcceptanceKind {
    match o {
        CertObjective::Reachability => AcceptanceKind::Reachability,
        CertObjective::Buchi => AcceptanceKind::Buchi,
        CertObjective::GeneralizedBuchi => AcceptanceKind::GeneralizedBuchi,
        CertObjective::Parity => AcceptanceKind::Parity,
    }
}

fn objective_of(k: AcceptanceKind) -> CertObjective {
    match k {
        AcceptanceKind::Reachability => CertObjective::Reachability,
        AcceptanceKind::Buchi => CertObjective::Buchi,
        AcceptanceKind::GeneralizedBuchi => CertObjective::GeneralizedBuchi,
        AcceptanceKind::Parity => CertObjective::Parity,
    }
}

pub fn serialize_certificate(a: &MetricAutomaton, c: &RankCertificate) -> String {
    let doc = CertificateDoc {
        objective: kind_of(c.objective),
        f: format_rat(&c.f_coeff),
        eta: c.eta_coeff.as_ref().map(format_rat),
        ranks: c
            .ranks
            .iter()
            .enumerate()
            .map(|(q, r)| (a.name(q).to_string(), r.iter().map(|x| x.to_string()).collect()))
            .collect(),
    };
    let mut t = serde_json::to_string_pretty(&doc).expect("certificate serializes");
    t.push('\n');
    t
}

fn positive(s: &str, path: &str) -> Result<Rat, DocError> {
    match parse_rat(s) {
        Ok(r) if r > Rat::from_integer(0.into()) => Ok(r),
        _ => Err(schema(path, format!("`{s}` is not a positive number"))),
    }
}

pub fn parse_certificate(a: &MetricAutomaton, text: &str) -> Result<RankCertificate, DocError> {
    let doc = from_json::<CertificateDoc>(text)?;
    let mut ranks: Vec<Option<Vec<ExtNonNeg>>> = vec![None; a.len()];
    for (n, r) in &doc.ranks {
        let path = format!("ranks.{n}");
        let q = a.state_id(n).ok_or_else(|| schema(&path, format!("unknown state `{n}`")))?;
        ranks[q] = Some(
            r.iter()
                .enumerate()
                .map(|(k, x)| x.parse().map_err(|_| schema(format!("{path}[{k}]"), format!("`{x}` is not a rank"))))
                .collect::<Result<_, _>>()?,
        );
    }
    if let Some(q) = ranks.iter().position(|r| r.is_none()) {
        return Err(schema("ranks", format!("missing state `{}`", a.name(q))));
    }
    Ok(RankCertificate {
        objective: objective_of(doc.objective),
        ranks: ranks.into_iter().map(|r| r.expect("checked")).collect(),
        f_coeff: positive(&doc.f, "f")?,
        eta_coeff: doc.eta.as_deref().map(|e| positive(e, "eta")).transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::running_example;
    use crate::num::rat;

    #[test]
    fn strategy_round_trip() {
        let a = running_example(false);
        let s = Strategy::uniform(&a, 1);
        let t = serialize_strategy(&a, &s);
        assert_eq!(parse_strategy(&a, &t).unwrap(), s);
        let bad = t.replacen("\"b\"", "\"c\"", 1);
        assert!(matches!(parse_strategy(&a, &bad), Err(DocError::Schema { .. })));
    }

    #[test]
    fn certificate_round_trip() {
        let a = running_example(false);
        let c = crate::certificates::construct_clf_from_strategy(&a, &Strategy::uniform(&a, 0), rat(1)).unwrap();
        let t = serialize_certificate(&a, &c);
        assert_eq!(parse_certificate(&a, &t).unwrap(), c);
    }
}
