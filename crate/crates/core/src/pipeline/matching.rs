//! Near-perfect matchings in `H_f`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::hypergraph::RandomHypergraph;
use crate::error::{Error, Result};
use crate::packing;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Greedy over a uniformly random order.
    Greedy,
    /// Rounds of random activation followed by greedy cleanup.
    Nibble,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingResult {
    pub matched: Vec<Vec<usize>>,
    /// Index of each matched tuple in the hypergraph's edge list.
    pub hyperedge_ids: Vec<usize>,
    pub uncovered: Vec<usize>,
    pub uncovered_count: usize,
    pub nibble_rounds: usize,
}

impl MatchingResult {
    fn from_ids(hf: &RandomHypergraph, mut ids: Vec<usize>, nibble_rounds: usize) -> MatchingResult {
        ids.sort_unstable();
        let mut covered = vec![false; hf.vertices];
        for &i in &ids {
            for &v in &hf.hyperedges[i] {
                covered[v] = true;
            }
        }
        let uncovered: Vec<usize> = (0..hf.vertices).filter(|&v| !covered[v]).collect();
        MatchingResult {
            matched: ids.iter().map(|&i| hf.hyperedges[i].clone()).collect(),
            hyperedge_ids: ids,
            uncovered_count: uncovered.len(),
            uncovered,
            nibble_rounds,
        }
    }

    /// Tuples pairwise disjoint and the uncovered list complementary.
    pub fn is_consistent(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for tuple in &self.matched {
            for &v in tuple {
                if v >= n || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        let uncovered: Vec<usize> = (0..n).filter(|&v| !seen[v]).collect();
        uncovered == self.uncovered && self.uncovered_count == uncovered.len()
    }
}

fn greedy_fill(hf: &RandomHypergraph, order: &[usize], free: &mut [bool], ids: &mut Vec<usize>) {
    for &i in order {
        let e = &hf.hyperedges[i];
        if e.iter().all(|&v| free[v]) {
            for &v in e {
                free[v] = false;
            }
            ids.push(i);
        }
    }
}

pub fn nibble_matching(hf: &RandomHypergraph, mode: MatchMode, epsilon: f64, seed: u64) -> Result<MatchingResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon = {epsilon} must lie in (0,1)")));
    }
    let mut rng = rng::seeded(seed);
    let mut free = vec![true; hf.vertices];
    let mut ids = Vec::new();
    let mut rounds = 0;
    if mode == MatchMode::Nibble {
        let cap = 10 * (hf.vertices.max(2) as f64).ln().ceil() as usize;
        let mut alive: Vec<usize> = (0..hf.hyperedges.len()).collect();
        while rounds < cap && !alive.is_empty() {
            rounds += 1;
            let mut deg = vec![0usize; hf.vertices];
            for &i in &alive {
                for &v in &hf.hyperedges[i] {
                    deg[v] += 1;
                }
            }
            let max_deg = deg.iter().copied().max().unwrap_or(0).max(1);
            let p = epsilon / max_deg as f64;
            let active: Vec<usize> = alive.iter().copied().filter(|_| rng.gen::<f64>() < p).collect();
            let mut hits = vec![0usize; hf.vertices];
            for &i in &active {
                for &v in &hf.hyperedges[i] {
                    hits[v] += 1;
                }
            }
            for &i in &active {
                let e = &hf.hyperedges[i];
                if e.iter().all(|&v| hits[v] == 1) {
                    for &v in e {
                        free[v] = false;
                    }
                    ids.push(i);
                }
            }
            alive.retain(|&i| hf.hyperedges[i].iter().all(|&v| free[v]));
        }
    }
    let mut order: Vec<usize> = (0..hf.hyperedges.len()).collect();
    order.shuffle(&mut rng);
    greedy_fill(hf, &order, &mut free, &mut ids);
    Ok(MatchingResult::from_ids(hf, ids, rounds))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub before: usize,
    pub after: usize,
    /// True when the search finished, so `after` is a maximum matching.
    pub optimal: bool,
    pub nodes: u64,
}

/// Improves a matching towards a maximum one by exact branch and bound,
/// stopping after `budget` search nodes with the best matching found.
pub fn augment_matching(hf: &RandomHypergraph, start: &MatchingResult, budget: u64) -> (MatchingResult, AugmentReport) {
    let flat: Vec<usize> = hf.hyperedges.iter().flatten().copied().collect();
    let weights = vec![1.0; hf.hyperedges.len()];
    let p = packing::max_weight_packing(
        hf.vertices,
        hf.t,
        &flat,
        &weights,
        true,
        Some(&start.hyperedge_ids),
        budget,
    );
    let improved = p.chosen.len() > start.hyperedge_ids.len();
    let result = if improved {
        MatchingResult::from_ids(hf, p.chosen.clone(), start.nibble_rounds)
    } else {
        start.clone()
    };
    let report = AugmentReport {
        before: start.matched.len(),
        after: result.matched.len(),
        optimal: p.optimal,
        nodes: p.nodes,
    };
    (result, report)
}
