mod common;

use common::{all_deterministic, random_automaton, rng, Kind};
use robsyn::fault::{compute_fault_bound, exhaustive_adversary_search, simulate_run, Adversary, DEFAULT_SEARCH_CAP};
use robsyn::io::generators::running_example;
use robsyn::Strategy;

#[test]
fn running_example_bound_holds() {
    let a = running_example(true);
    let s = Strategy::uniform(&a, 0);
    let b = compute_fault_bound(&a, &s).unwrap();
    assert_eq!(b.n, Some(2));
    assert!(b.certified);
    assert!(exhaustive_adversary_search(&a, &s, 2, DEFAULT_SEARCH_CAP).unwrap().violation.is_none());
}

#[test]
fn violations_disappear_with_wider_spacing() {
    let mut r = rng(17);
    for i in 0..20 {
        let kind = if i % 2 == 0 { Kind::Buchi } else { Kind::Parity };
        let a = random_automaton(&mut r, kind, 5, 2);
        for s in all_deterministic(&a).into_iter().take(8) {
            let mut seen_clean = false;
            for n in 0..5 {
                let Ok(out) = exhaustive_adversary_search(&a, &s, n, DEFAULT_SEARCH_CAP) else { break };
                if seen_clean {
                    assert!(out.violation.is_none(), "violation reappears at N={n}");
                }
                seen_clean |= out.violation.is_none();
            }
        }
    }
}

#[test]
fn witnesses_replay_in_simulation() {
    let mut r = rng(23);
    let mut replayed = 0;
    for _ in 0..30 {
        let a = random_automaton(&mut r, Kind::Buchi, 6, 3);
        for s in all_deterministic(&a).into_iter().take(6) {
            let Ok(out) = exhaustive_adversary_search(&a, &s, 1, DEFAULT_SEARCH_CAP) else { continue };
            let Some(w) = out.violation else { continue };
            let (script, states) = w.script(3);
            let run = simulate_run(&a, &s, &Adversary::Scripted { faults: script, n_bound: 1 }, states.len() - 1).unwrap();
            assert_eq!(run.trace[..states.len()], states[..], "{}", w.describe(&a));
            replayed += 1;
        }
    }
    assert!(replayed > 0);
}

#[test]
fn nominal_runs_of_winning_strategies_accept() {
    let a = running_example(true);
    let s = Strategy::uniform(&a, 0);
    let run = simulate_run(&a, &s, &Adversary::Nominal, 20).unwrap();
    assert!(run.faults.is_empty());
    assert!(run.accepted);
}
