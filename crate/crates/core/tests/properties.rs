mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{random_automaton, rng, Kind};
use robsyn::fixpoint::apply_operator;
use robsyn::io::document::serialize_document;
use robsyn::io::generators::running_example;
use robsyn::model::{restrict_by_strategy, validate_automaton, Violation};
use robsyn::num::rat;
use robsyn::parity::{obligation, rhd};
use robsyn::{ExtNonNeg, Metric, MetricAutomaton, Strategy};

fn ext(v: &[Option<u8>]) -> Vec<ExtNonNeg> {
    v.iter().map(|x| x.map_or(ExtNonNeg::Inf, |k| ExtNonNeg::Fin(rat(k as i64)))).collect()
}

fn words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..len {
        frontier = frontier
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..k).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
        out.extend(frontier.clone());
    }
    out
}

fn post_set(a: &MetricAutomaton, from: &BTreeSet<usize>, w: &[usize]) -> BTreeSet<usize> {
    from.iter().flat_map(|&q| a.post(q, w)).collect()
}

/// Direct oracle for triangle-inequality failures.
fn triangle_failures(m: &[Vec<ExtNonNeg>]) -> BTreeSet<(usize, usize, usize)> {
    let n = m.len();
    let mut out = BTreeSet::new();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                if m[p][r] > m[p][q].add(&m[q][r]) {
                    out.insert((p, q, r));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_is_monotone(seed in any::<u64>(), lo in prop::collection::vec(prop::option::of(0u8..6), 6), bump in prop::collection::vec(0u8..4, 6)) {
        let a = random_automaton(&mut rng(seed), Kind::Reachability, 6, 3);
        let n = a.len();
        let v = ext(&lo[..n]);
        let w: Vec<ExtNonNeg> = v.iter().zip(&bump).map(|(x, &b)| x.add(&ExtNonNeg::Fin(rat(b as i64)))).collect();
        let allowed = a.all_allowed();
        let gv = apply_operator(&a, &allowed, &v);
        let gw = apply_operator(&a, &allowed, &w);
        for q in 0..n {
            prop_assert!(gv[q] <= gw[q]);
            prop_assert!(gv[q] <= v[q]);
        }
    }

    #[test]
    fn post_distributes_over_words(seed in any::<u64>()) {
        let a = random_automaton(&mut rng(seed), Kind::Buchi, 5, 2);
        let k = a.inputs.len();
        for u in words(k, 2) {
            for v in words(k, 3 - u.len()) {
                let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
                for q in 0..a.len() {
                    let direct: BTreeSet<usize> = a.post(q, &uv).into_iter().collect();
                    let staged = post_set(&a, &a.post(q, &u).into_iter().collect(), &v);
                    prop_assert_eq!(direct, staged);
                }
            }
        }
    }

    #[test]
    fn ball_successors_respect_gamma(seed in any::<u64>()) {
        let a = random_automaton(&mut rng(seed), Kind::Parity, 6, 3);
        for t in &a.transitions {
            for &p in a.post_input(t.from, t.input) {
                prop_assert!(a.d(p, t.nominal) <= ExtNonNeg::Fin(a.gamma_of(t.nominal)));
            }
        }
    }

    #[test]
    fn restriction_is_idempotent(seed in any::<u64>(), picks in prop::collection::vec(0usize..3, 6)) {
        let a = random_automaton(&mut rng(seed), Kind::Reachability, 6, 3);
        let choice: Vec<Option<usize>> = (0..a.len())
            .map(|q| {
                let en = a.enabled(q);
                (!en.is_empty()).then(|| en[picks[q] % en.len()])
            })
            .collect();
        let once = restrict_by_strategy(&a, &Strategy::from_choices(&choice)).unwrap();
        let again_choice: Vec<Option<usize>> = once.original.iter().map(|&q| choice[q]).collect();
        let twice = restrict_by_strategy(&once.automaton, &Strategy::from_choices(&again_choice)).unwrap();
        prop_assert_eq!(twice.original, (0..once.automaton.len()).collect::<Vec<_>>());
        prop_assert_eq!(serialize_document(&twice.automaton), serialize_document(&once.automaton));
    }

    #[test]
    fn metric_perturbations_are_caught(p in 0usize..7, q in 0usize..7, value in 0i64..12, symmetric in any::<bool>()) {
        prop_assume!(p != q);
        let mut a = running_example(false);
        let Metric::Explicit(m) = &mut a.metric else { unreachable!() };
        let old = m[p][q].clone();
        prop_assume!(old != ExtNonNeg::Fin(rat(value)));
        m[p][q] = ExtNonNeg::Fin(rat(value));
        if symmetric {
            m[q][p] = ExtNonNeg::Fin(rat(value));
        }
        let expected = triangle_failures(m);
        let report = validate_automaton(&a);
        let found: BTreeSet<(usize, usize, usize)> = report
            .violations
            .iter()
            .filter_map(|v| if let Violation::Triangle(x, y, z) = v { Some((*x, *y, *z)) } else { None })
            .collect();
        prop_assert_eq!(found, expected);
        let asym = report.violations.iter().any(|v| matches!(v, Violation::Asymmetric(..)));
        prop_assert_eq!(asym, !symmetric);
        prop_assert_eq!(report.violations.iter().any(|v| matches!(v, Violation::Indiscernible(..))), value == 0);
    }

    #[test]
    fn rhd_relations(colour in prop::option::of(0usize..6), x in prop::collection::vec(prop::option::of(0u8..4), 3), y in prop::collection::vec(prop::option::of(0u8..4), 3), z in prop::collection::vec(prop::option::of(0u8..4), 3)) {
        let (a, b, c) = (ext(&x), ext(&y), ext(&z));
        let (len, strict) = obligation(colour, 3);
        // reflexive exactly on non-strict obligations
        prop_assert_eq!(rhd(colour, &a, &a), !strict);
        // transitive
        if rhd(colour, &a, &b) && rhd(colour, &b, &c) {
            prop_assert!(rhd(colour, &a, &c));
        }
        // only the obligation prefix matters
        let mut d = b.clone();
        for k in len..3 {
            d[k] = ExtNonNeg::Inf;
        }
        prop_assert_eq!(rhd(colour, &a, &b), rhd(colour, &a, &d));
        // strict implies the non-strict relation of the even colour with the same prefix
        if strict && rhd(colour, &a, &b) {
            prop_assert!(a[..len] >= b[..len]);
        }
    }
}

#[test]
fn running_example_table_findings() {
    let a = running_example(false);
    let report = validate_automaton(&a);
    assert!(report.violations.iter().all(|v| matches!(v, Violation::Triangle(..))));
    let pairs: BTreeSet<(usize, usize)> = report
        .violations
        .iter()
        .filter_map(|v| if let Violation::Triangle(p, _, r) = v { Some(((*p).min(*r), (*p).max(*r))) } else { None })
        .collect();
    assert_eq!(pairs, BTreeSet::from([(2, 5), (2, 6)]));
}
