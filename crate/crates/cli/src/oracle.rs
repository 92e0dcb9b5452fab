//! Reference computations that share no code with `cfl-core`'s solvers:
//! exhaustive clique listing, an off-the-shelf LP solver, and direct
//! load/degree tallies.

use std::collections::HashMap;

use cfl_core::{Graph, WGraph};
use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Every `t`-subset of vertices that is pairwise adjacent, in lexicographic order.
pub fn all_cliques(g: &Graph, t: usize) -> Vec<Vec<usize>> {
    fn go(g: &Graph, t: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            if cur.iter().enumerate().all(|(i, &u)| cur[i + 1..].iter().all(|&v| g.has_edge(u, v))) {
                out.push(cur.clone());
            }
            return;
        }
        for v in start..g.n() {
            cur.push(v);
            go(g, t, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t > 0 {
        go(g, t, 0, &mut Vec::with_capacity(t), &mut out);
    }
    out
}

/// `t*(G, w)` from minilp on the primal programme over all cliques.
pub fn minilp_t_star(wg: &WGraph, t: usize) -> Result<f64, String> {
    let g = wg.base();
    let cliques = all_cliques(g, t);
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = cliques.iter().map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let mut by_vertex = vec![Vec::new(); g.n()];
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, c) in cliques.iter().enumerate() {
        for (a, &u) in c.iter().enumerate() {
            by_vertex[u].push(i);
            for &v in &c[a + 1..] {
                by_edge.entry((u, v)).or_default().push(i);
            }
        }
    }
    for ids in by_vertex.iter().filter(|ids| !ids.is_empty()) {
        lp.add_constraint(ids.iter().map(|&i| (vars[i], 1.0)), ComparisonOp::Le, 1.0);
    }
    let mut edges: Vec<_> = by_edge.into_iter().collect();
    edges.sort();
    for ((u, v), ids) in edges {
        let w = *wg.weight(u, v).expect("clique pair is an edge");
        lp.add_constraint(ids.iter().map(|&i| (vars[i], 1.0)), ComparisonOp::Le, w);
    }
    lp.solve().map(|s| s.objective()).map_err(|e| e.to_string())
}

/// `Σ_{T ⊇ uv} f(T)` keyed by the ordered pair, straight from the tuples.
pub fn tuple_pair_loads(tuples: &[&[usize]], f: &[f64]) -> HashMap<(usize, usize), f64> {
    let mut load = HashMap::new();
    for (c, &x) in tuples.iter().zip(f) {
        if x == 0.0 {
            continue;
        }
        for (a, &u) in c.iter().enumerate() {
            for &v in &c[a + 1..] {
                *load.entry((u, v)).or_insert(0.0) += x;
            }
        }
    }
    load
}

/// `Σ_u w(uv)` per vertex, with `w` given per edge of `g` in edge-id order.
pub fn weighted_degrees(g: &Graph, w: &[f64]) -> Vec<f64> {
    let mut deg = vec![0.0; g.n()];
    for (&(u, v), x) in g.edges().iter().zip(w) {
        deg[u] += x;
        deg[v] += x;
    }
    deg
}

/// Degrees and the largest pair codegree of a list of hyperedges.
pub fn degree_codegree(n: usize, hyperedges: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut deg = vec![0; n];
    let mut co: HashMap<(usize, usize), usize> = HashMap::new();
    for e in hyperedges {
        for (a, &u) in e.iter().enumerate() {
            deg[u] += 1;
            for &v in &e[a + 1..] {
                *co.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
    }
    (deg, co.values().copied().max().unwrap_or(0))
}
