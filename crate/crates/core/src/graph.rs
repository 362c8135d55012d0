//! Small explicit-graph helpers: reachability, shortest paths and cycle witnesses.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Breadth-first search; returns the parent array (`usize::MAX` for the root and unseen nodes)
/// and the visited mask. Nodes for which `expand` is false are visited but not expanded.
pub fn bfs(
    n: usize,
    start: &[usize],
    succ: &dyn Fn(usize) -> Vec<usize>,
    expand: &dyn Fn(usize) -> bool,
) -> (Vec<usize>, Vec<bool>) {
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        if !expand(u) {
            continue;
        }
        for v in succ(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    (parent, seen)
}

pub fn path_to(parent: &[usize], target: usize) -> Vec<usize> {
    let mut path = vec![target];
    let mut cur = target;
    while parent[cur] != usize::MAX {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Shortest cycle through `node` using only nodes in `within`.
pub fn cycle_through(
    n: usize,
    node: usize,
    succ: &dyn Fn(usize) -> Vec<usize>,
    within: &dyn Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for v in succ(node) {
        if v == node {
            return Some(vec![node]);
        }
        if within(v) && !seen[v] {
            seen[v] = true;
            parent[v] = node;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for v in succ(u) {
            if v == node {
                let mut cyc = path_to_root(&parent, u, node);
                cyc.reverse();
                return Some(cyc);
            }
            if within(v) && !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

fn path_to_root(parent: &[usize], from: usize, root: usize) -> Vec<usize> {
    let mut out = vec![from];
    let mut cur = from;
    while cur != root {
        cur = parent[cur];
        out.push(cur);
    }
    out
}

/// Nodes of `mask` lying on a cycle that stays inside `mask`.
pub fn on_cycle_within(n: usize, succ: &dyn Fn(usize) -> Vec<usize>, mask: &[bool]) -> Vec<bool> {
    let mut g = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for u in 0..n {
        if !mask[u] {
            continue;
        }
        for v in succ(u) {
            if mask[v] {
                g.add_edge(nodes[u], nodes[v], ());
            }
        }
    }
    let mut out = vec![false; n];
    for comp in tarjan_scc(&g) {
        let u = comp[0].index();
        if !mask[u] {
            continue;
        }
        if comp.len() > 1 || succ(u).contains(&u) {
            for c in comp {
                out[c.index()] = true;
            }
        }
    }
    out
}

/// A lasso from one of `start` into a cycle that stays inside `mask`, exploring
/// only through nodes for which `expand` holds.
pub fn lasso_within(
    n: usize,
    start: &[usize],
    succ: &dyn Fn(usize) -> Vec<usize>,
    expand: &dyn Fn(usize) -> bool,
    mask: &[bool],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let (parent, seen) = bfs(n, start, succ, expand);
    let reach_mask: Vec<bool> = (0..n).map(|u| seen[u] && mask[u] && expand(u)).collect();
    let cyc = on_cycle_within(n, succ, &reach_mask);
    let entry = (0..n).filter(|&u| cyc[u]).min_by_key(|&u| path_to(&parent, u).len())?;
    let mut stem = path_to(&parent, entry);
    stem.pop();
    let cycle = cycle_through(n, entry, succ, &|v| reach_mask[v])?;
    Some((stem, cycle))
}
