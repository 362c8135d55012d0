//! The min-max operator shared by every objective:
//! `g(v)(q) = min(v(q), min_a max_{p ∈ Post_a(q)} v(p))` over a total order.

use crate::model::{Allowed, MetricAutomaton, StateId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointRun<T> {
    pub values: Vec<T>,
    /// Number of applications of the operator that changed the vector.
    pub iterations: usize,
    /// Iteration at which each state last improved (0 if never).
    pub settled_at: Vec<usize>,
}

/// Worst-case successor value of input `x` at `q`.
pub fn worst_successor<'a, T: Ord>(a: &MetricAutomaton, v: &'a [T], q: StateId, x: usize) -> Option<&'a T> {
    a.post_input(q, x).iter().map(|&p| &v[p]).max()
}

/// One application of the operator.
pub fn apply_operator<T: Ord + Clone>(a: &MetricAutomaton, allowed: &Allowed, v: &[T]) -> Vec<T> {
    (0..a.len())
        .map(|q| {
            let best = allowed[q].iter().filter_map(|&x| worst_successor(a, v, q, x)).min();
            match best {
                Some(b) if *b < v[q] => b.clone(),
                _ => v[q].clone(),
            }
        })
        .collect()
}

/// Iterates the operator from `init` until nothing changes.
pub fn minmax_fixpoint<T: Ord + Clone>(a: &MetricAutomaton, allowed: &Allowed, init: Vec<T>) -> FixpointRun<T> {
    let mut values = init;
    let mut settled_at = vec![0; a.len()];
    let mut iterations = 0;
    loop {
        let next = apply_operator(a, allowed, &values);
        if next == values {
            break;
        }
        iterations += 1;
        for q in 0..a.len() {
            if next[q] != values[q] {
                settled_at[q] = iterations;
            }
        }
        values = next;
    }
    FixpointRun { values, iterations, settled_at }
}
