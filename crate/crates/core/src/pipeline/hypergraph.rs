//! The random hypergraph `H_f` and its degree/codegree audit.

use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::extract::FactorBundle;
use crate::error::{Error, Result};
use crate::rng;
use crate::spectral::BranchExponents;

/// Cliques kept independently with probability `f(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomHypergraph {
    pub t: usize,
    pub vertices: usize,
    /// Ascending `t`-tuples.
    pub hyperedges: Vec<Vec<usize>>,
    /// Host clique id of each hyperedge.
    pub source_ids: Vec<usize>,
    /// `f(T)` per host clique id.
    pub inclusion_prob: Vec<f64>,
}

impl RandomHypergraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices];
        for e in &self.hyperedges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Number of hyperedges through each vertex pair that has any.
    pub fn codegrees(&self) -> HashMap<(usize, usize), usize> {
        let mut co = HashMap::new();
        for e in &self.hyperedges {
            for (i, &u) in e.iter().enumerate() {
                for &v in &e[i + 1..] {
                    *co.entry((u, v)).or_insert(0) += 1;
                }
            }
        }
        co
    }
}

/// Samples `H_f` for `f = Σ_i f_i`.
pub fn build_hf(bundle: &FactorBundle, tol: f64, seed: u64) -> Result<RandomHypergraph> {
    let f = bundle.combined();
    if let Some((id, x)) = f.iter().enumerate().find(|(_, x)| **x > 1.0 + 10.0 * tol) {
        return Err(Error::Invariant(format!(
            "clique {:?} has combined weight {x} > 1",
            bundle.cliques.clique(id)
        )));
    }
    let prob: Vec<f64> = f.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let mut rng = rng::seeded(seed);
    let mut hyperedges = Vec::new();
    let mut source_ids = Vec::new();
    for (id, &p) in prob.iter().enumerate() {
        if p > 0.0 && rng.gen::<f64>() < p {
            hyperedges.push(bundle.cliques.clique(id).to_vec());
            source_ids.push(id);
        }
    }
    Ok(RandomHypergraph {
        t: bundle.t,
        vertices: bundle.cliques.n(),
        hyperedges,
        source_ids,
        inclusion_prob: prob,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    /// False when `ℓ < 2`, where `ln ℓ` gives no band.
    pub applicable: bool,
    pub ell: usize,
    /// `k = 8 β^{-1/2}`.
    pub k: f64,
    /// `(k/2) √(ℓ ln ℓ)`.
    pub half_width: f64,
    pub degree_lower: f64,
    pub degree_upper: f64,
    pub degree_min: usize,
    pub degree_max: usize,
    pub degree_mean: f64,
    pub outside_degree_band: usize,
    /// Vertices in no hyperedge. Reported separately because at desk scale
    /// the lower end of the band is negative.
    pub zero_degree_count: usize,
    /// `1 + 3 ln n`.
    pub codegree_bound: f64,
    pub max_codegree: usize,
    pub outside_codegree_band: usize,
    pub flagged: bool,
}

pub fn concentration_audit(hf: &RandomHypergraph, ell: usize, n: usize) -> ConcentrationReport {
    let beta = BranchExponents::for_order(hf.t.max(3)).beta;
    let k = 8.0 / beta.sqrt();
    let deg = hf.degrees();
    let co = hf.codegrees();
    let codegree_bound = 1.0 + 3.0 * (n.max(1) as f64).ln();
    let max_codegree = co.values().copied().max().unwrap_or(0);
    let outside_codegree_band = co.values().filter(|&&c| c as f64 > codegree_bound).count();
    let zero_degree_count = deg.iter().filter(|&&x| x == 0).count();
    let degree_mean = if deg.is_empty() {
        0.0
    } else {
        deg.iter().sum::<usize>() as f64 / deg.len() as f64
    };
    let applicable = ell >= 2;
    let (half_width, lower, upper, outside) = if applicable {
        let l = ell as f64;
        let hw = k / 2.0 * (l * l.ln()).sqrt();
        let outside = deg
            .iter()
            .filter(|&&x| (x as f64) < l - hw || (x as f64) > l + hw)
            .count();
        (hw, l - hw, l + hw, outside)
    } else {
        (0.0, 0.0, 0.0, 0)
    };
    ConcentrationReport {
        applicable,
        ell,
        k,
        half_width,
        degree_lower: lower,
        degree_upper: upper,
        degree_min: deg.iter().copied().min().unwrap_or(0),
        degree_max: deg.iter().copied().max().unwrap_or(0),
        degree_mean,
        outside_degree_band: outside,
        zero_degree_count,
        codegree_bound,
        max_codegree,
        outside_codegree_band,
        flagged: applicable && (outside > 0 || zero_degree_count > 0 || outside_codegree_band > 0),
    }
}
