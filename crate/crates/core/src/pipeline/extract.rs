//! Extraction of many fractional factors with bounded aggregate pair load.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliques::{self, CliqueSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lp;
use crate::rng;
use crate::weighted::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Dense,
    Sparse,
}

/// How a dense round picked its factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorChoice {
    /// Basic solution of the load-one programme, then made as integral as
    /// possible by [`lp::rounded_factor`].
    Rounded,
    /// Factor minimising the largest pair-load-to-weight ratio, used when
    /// the basic choice left no factor for the next round.
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    pub t_star: f64,
    pub has_factor: bool,
    pub choice: Option<FactorChoice>,
    /// Cliques with weight above the tolerance.
    pub support: usize,
    /// Cliques carrying weight exactly 1.
    pub integral_cliques: usize,
    /// `max_v |deg_w(v) before − after − (t−1)|`.
    pub max_decrement_error: f64,
    /// Most negative weight produced by the update, before clamping.
    pub min_weight_before_clamp: f64,
    /// `α`-rich edges remaining after the update.
    pub rich_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartReport {
    pub index: usize,
    pub edges: usize,
    pub cliques: usize,
    pub t_star: f64,
    pub has_factor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub ell: usize,
    pub edge_counts: Vec<usize>,
    pub expected: f64,
    pub sigma: f64,
    /// Largest `|m_i − m/ℓ| / σ`.
    pub max_deviation_sigmas: f64,
    /// True when some part lies more than five standard deviations out.
    pub warning: bool,
}

/// A list of fractional factors of a common host graph, indexed by the
/// host's clique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorBundle {
    pub t: usize,
    pub mode: Mode,
    pub requested: usize,
    pub cliques: CliqueSet,
    pub factors: Vec<Vec<f64>>,
    /// `Σ_i Σ_{T⊇uv} f_i(T)` per host edge id.
    pub per_edge_load: Vec<f64>,
    pub rounds: Vec<RoundReport>,
    pub parts: Vec<PartReport>,
    pub split: Option<SplitReport>,
}

impl FactorBundle {
    pub fn ell(&self) -> usize {
        self.factors.len()
    }

    pub fn max_edge_load(&self) -> f64 {
        self.per_edge_load.iter().copied().fold(0.0, f64::max)
    }

    /// `f(T) = Σ_i f_i(T)`.
    pub fn combined(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.cliques.len()];
        for fi in &self.factors {
            for (acc, x) in f.iter_mut().zip(fi) {
                *acc += x;
            }
        }
        f
    }
}

/// Candidate cliques tried per step of [`lp::rounded_factor`].
const ROUNDING_ATTEMPTS: usize = 5;

/// `(d/(4n))^{t−2} / (20t)`.
pub fn default_alpha(n: usize, d: usize, t: usize) -> f64 {
    (d as f64 / (4.0 * n as f64)).powi(t as i32 - 2) / (20.0 * t as f64)
}

fn weighted_degrees(g: &Graph, w: &[f64]) -> Vec<f64> {
    (0..g.n())
        .map(|v| g.incident_edges(v).iter().map(|&e| w[e]).sum())
        .collect()
}

/// Repeatedly takes a fractional factor of `(G, w)` and subtracts its pair
/// loads from `w`, starting from `w ≡ 1`.
///
/// Stops early, keeping the factors found so far, once the current weights
/// admit no fractional factor.
pub fn dense_extract(g: &Graph, t: usize, ell: usize, alpha: Option<f64>, tol: f64) -> Result<FactorBundle> {
    if t < 3 {
        return Err(Error::param("t must be at least 3"));
    }
    if ell == 0 {
        return Err(Error::param("ell must be at least 1"));
    }
    let d = g.regular_degree()?;
    let alpha = alpha.unwrap_or_else(|| default_alpha(g.n(), d, t));
    let cliques = cliques::enumerate_cliques(g, t)?;
    let mut w = vec![1.0; g.m()];
    let mut factors = Vec::new();
    let mut rounds = Vec::new();
    let mut per_edge_load = vec![0.0; g.m()];
    let mut pending: Option<lp::FactorCert<f64>> = None;

    let round_err = |i: usize, e: Error| Error::Numerical(format!("dense round {}: {e}", i + 1));
    for i in 0..ell {
        let wg = WeightedGraph::new(g.clone(), w.clone())?;
        let cert = match pending.take() {
            Some(c) => c,
            None => lp::fractional_factor_in(&wg, &cliques, &tol).map_err(|e| round_err(i, e))?,
        };
        if !cert.has_factor {
            rounds.push(RoundReport {
                round: i + 1,
                t_star: cert.t_star,
                has_factor: false,
                choice: None,
                support: 0,
                integral_cliques: 0,
                max_decrement_error: 0.0,
                min_weight_before_clamp: 0.0,
                rich_edges: wg.rich_subgraph(&alpha)?.m(),
            });
            break;
        }
        let mut f = match lp::rounded_factor(&wg, &cliques, tol, ROUNDING_ATTEMPTS).map_err(|e| round_err(i, e))? {
            Some((r, _)) => r,
            None => cert.f.clone(),
        };
        let mut choice = FactorChoice::Rounded;
        let mut loads = lp::pair_loads(g, &cliques, &f);
        if i + 1 < ell {
            let next = updated(&w, &loads);
            let next_cert = lp::fractional_factor_in(&WeightedGraph::new(g.clone(), next.0)?, &cliques, &tol)
                .map_err(|e| round_err(i + 1, e))?;
            if next_cert.has_factor {
                pending = Some(next_cert);
            } else if let Some((fb, _)) = lp::balanced_factor(&wg, &cliques, &tol).map_err(|e| round_err(i, e))? {
                f = fb;
                choice = FactorChoice::Balanced;
                loads = lp::pair_loads(g, &cliques, &f);
            } else {
                pending = Some(next_cert);
            }
        }
        let (next, min_raw) = updated(&w, &loads);
        if min_raw < -tol {
            return Err(Error::Invariant(format!(
                "dense round {}: weight fell to {min_raw:e}",
                i + 1
            )));
        }
        let before = weighted_degrees(g, &w);
        let after = weighted_degrees(g, &next);
        let max_decrement_error = before
            .iter()
            .zip(&after)
            .map(|(b, a)| (b - a - (t - 1) as f64).abs())
            .fold(0.0, f64::max);
        if max_decrement_error > 10.0 * tol {
            return Err(Error::Invariant(format!(
                "dense round {}: weighted degree dropped by t−1 only up to {max_decrement_error:e}",
                i + 1
            )));
        }
        for (acc, x) in per_edge_load.iter_mut().zip(&loads) {
            *acc += x;
        }
        w = next;
        rounds.push(RoundReport {
            round: i + 1,
            t_star: cert.t_star,
            has_factor: true,
            choice: Some(choice),
            support: f.iter().filter(|&&x| x > tol).count(),
            integral_cliques: f.iter().filter(|&&x| x == 1.0).count(),
            max_decrement_error,
            min_weight_before_clamp: min_raw,
            rich_edges: WeightedGraph::new(g.clone(), w.clone())?.rich_subgraph(&alpha)?.m(),
        });
        factors.push(f);
    }
    Ok(FactorBundle {
        t,
        mode: Mode::Dense,
        requested: ell,
        cliques,
        factors,
        per_edge_load,
        rounds,
        parts: Vec::new(),
        split: None,
    })
}

/// `w − loads`, clamped to `[0, 1]`, with the smallest raw value.
fn updated(w: &[f64], loads: &[f64]) -> (Vec<f64>, f64) {
    let mut min_raw = f64::INFINITY;
    let next = w
        .iter()
        .zip(loads)
        .map(|(x, l)| {
            let raw = x - l;
            min_raw = min_raw.min(raw);
            raw.clamp(0.0, 1.0)
        })
        .collect();
    (next, if min_raw.is_finite() { min_raw } else { 0.0 })
}

/// Assigns every edge to one of `ell` parts independently and uniformly.
pub fn sparse_split(g: &Graph, ell: usize, seed: u64) -> Result<Vec<Graph>> {
    Ok(split_with_report(g, ell, seed)?.0)
}

pub fn split_with_report(g: &Graph, ell: usize, seed: u64) -> Result<(Vec<Graph>, SplitReport)> {
    if ell == 0 {
        return Err(Error::param("ell must be at least 1"));
    }
    let mut rng = rng::seeded(seed);
    let part: Vec<usize> = (0..g.m()).map(|_| rng.gen_range(0..ell)).collect();
    let parts: Vec<Graph> = (0..ell).map(|i| g.filter_edges(|e| part[e] == i)).collect();
    let edge_counts: Vec<usize> = parts.iter().map(Graph::m).collect();
    let p = 1.0 / ell as f64;
    let expected = g.m() as f64 * p;
    let sigma = (g.m() as f64 * p * (1.0 - p)).sqrt();
    let max_deviation_sigmas = if sigma > 0.0 {
        edge_counts
            .iter()
            .map(|&c| (c as f64 - expected).abs() / sigma)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let report = SplitReport {
        ell,
        edge_counts,
        expected,
        sigma,
        max_deviation_sigmas,
        warning: max_deviation_sigmas > 5.0,
    };
    Ok((parts, report))
}

/// Splits the edges into `ell` random parts and takes a fractional factor
/// (with `w ≡ 1`) of every part that has one. Parts are edge-disjoint, so
/// each clique carries weight in at most one factor.
pub fn sparse_extract(g: &Graph, t: usize, ell: usize, seed: u64, tol: f64) -> Result<FactorBundle> {
    if t < 3 {
        return Err(Error::param("t must be at least 3"));
    }
    let cliques = cliques::enumerate_cliques(g, t)?;
    let (parts, split) = split_with_report(g, ell, seed)?;
    let solved: Vec<Result<(PartReport, Option<Vec<f64>>)>> = parts
        .par_iter()
        .enumerate()
        .map(|(index, part)| {
            let pc = cliques::enumerate_cliques(part, t)?;
            let wg = WeightedGraph::unit(part.clone());
            let part_err = |e: Error| Error::Numerical(format!("sparse part {index}: {e}"));
            let cert = lp::fractional_factor_in(&wg, &pc, &tol).map_err(part_err)?;
            let report = PartReport {
                index,
                edges: part.m(),
                cliques: pc.len(),
                t_star: cert.t_star,
                has_factor: cert.has_factor,
            };
            if !cert.has_factor {
                return Ok((report, None));
            }
            let part_f = match lp::rounded_factor(&wg, &pc, tol, ROUNDING_ATTEMPTS).map_err(part_err)? {
                Some((r, _)) => r,
                None => cert.f,
            };
            let mut f = vec![0.0; cliques.len()];
            for (id, x) in part_f.iter().enumerate() {
                if *x != 0.0 {
                    let host = cliques.find(pc.clique(id)).expect("part clique is a host clique");
                    f[host] = *x;
                }
            }
            Ok((report, Some(f)))
        })
        .collect();
    let mut factors = Vec::new();
    let mut reports = Vec::new();
    for r in solved {
        let (report, f) = r?;
        reports.push(report);
        factors.extend(f);
    }
    let mut per_edge_load = vec![0.0; g.m()];
    for f in &factors {
        for (acc, x) in per_edge_load.iter_mut().zip(lp::pair_loads(g, &cliques, f)) {
            *acc += x;
        }
    }
    Ok(FactorBundle {
        t,
        mode: Mode::Sparse,
        requested: ell,
        cliques,
        factors,
        per_edge_load,
        rounds: Vec::new(),
        parts: reports,
        split: Some(split),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    const TOL: f64 = lp::DEFAULT_TOL;

    #[test]
    fn k6_one_round() {
        let g = gen::complete(6).unwrap();
        let b = dense_extract(&g, 3, 1, None, TOL).unwrap();
        assert_eq!(b.ell(), 1);
        let w: Vec<f64> = b.per_edge_load.iter().map(|l| 1.0 - l).collect();
        for v in 0..6 {
            assert!((weighted_degrees(&g, &w)[v] - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn k6_two_rounds_then_exhausted() {
        let g = gen::complete(6).unwrap();
        let b = dense_extract(&g, 3, 2, None, TOL).unwrap();
        assert_eq!(b.ell(), 2);
        let w: Vec<f64> = b.per_edge_load.iter().map(|l| 1.0 - l).collect();
        assert!(weighted_degrees(&g, &w).iter().all(|x| (x - 1.0).abs() < 1e-9));
        let b3 = dense_extract(&g, 3, 3, None, TOL).unwrap();
        assert_eq!(b3.ell(), 2);
        assert!(!b3.rounds[2].has_factor);
        assert!(b3.rounds[2].t_star < 2.0 - 1e-6);
    }

    #[test]
    fn k12_two_rounds_respect_edge_loads() {
        let b = dense_extract(&gen::complete(12).unwrap(), 3, 2, None, TOL).unwrap();
        assert_eq!(b.ell(), 2);
        assert!(b.max_edge_load() <= 1.0 + TOL);
        assert!(b.rounds.iter().all(|r| r.max_decrement_error <= 1e-6));
        assert!(b.rounds.iter().all(|r| r.integral_cliques == 4));
    }

    #[test]
    fn split_examples() {
        let k6 = gen::complete(6).unwrap();
        assert_eq!(sparse_split(&k6, 1, 3).unwrap(), vec![k6.clone()]);
        let parts = sparse_split(&k6, 4, 3).unwrap();
        assert_eq!(parts.iter().map(Graph::m).sum::<usize>(), 15);
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                assert_eq!(a.intersection(b).unwrap().m(), 0);
            }
        }
        assert!(sparse_split(&k6, 0, 3).is_err());
    }

    #[test]
    fn sparse_examples() {
        let k6 = gen::complete(6).unwrap();
        let b = sparse_extract(&k6, 3, 1, 0, TOL).unwrap();
        assert_eq!(b.ell(), 1);

        let b = sparse_extract(&k6, 3, 15, 9, TOL).unwrap();
        assert!(b.ell() <= 1);
        assert!(b.max_edge_load() <= 1.0 + TOL);
    }
}
