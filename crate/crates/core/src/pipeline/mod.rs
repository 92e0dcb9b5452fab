//! End-to-end pipeline: certify the graph, extract `ℓ` fractional factors,
//! sample `H_f`, and match it.

mod extract;
mod hypergraph;
mod matching;

pub use extract::{
    default_alpha, dense_extract, sparse_extract, sparse_split, split_with_report, FactorBundle, FactorChoice,
    Mode, PartReport, RoundReport, SplitReport,
};
pub use hypergraph::{build_hf, concentration_audit, ConcentrationReport, RandomHypergraph};
pub use matching::{augment_matching, nibble_matching, AugmentReport, MatchMode, MatchingResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lp;
use crate::rng;
use crate::spectral::{self, Branch, BranchExponents, HypothesisReport, SpectralCert};

/// Default search-node budget for [`augment_matching`] inside the pipeline.
pub const AUGMENT_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub t: usize,
    pub mode: ModeChoice,
    /// `None` means `max(2, ⌊n^β⌋)`.
    pub ell: Option<usize>,
    /// `None` means `(d/(4n))^{t−2}/(20t)`.
    pub alpha: Option<f64>,
    pub epsilon: f64,
    pub seed: u64,
    pub tol: f64,
    pub matcher: MatchMode,
    /// Node budget for exact augmentation; 0 disables it.
    pub augment_budget: u64,
}

impl PipelineConfig {
    pub fn new(t: usize, seed: u64) -> PipelineConfig {
        PipelineConfig {
            t,
            mode: ModeChoice::Auto,
            ell: None,
            alpha: None,
            epsilon: 0.1,
            seed,
            tol: lp::DEFAULT_TOL,
            matcher: MatchMode::Nibble,
            augment_budget: AUGMENT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub lambda: f64,
    pub ell: usize,
    pub mode_requested: ModeChoice,
    pub mode: Mode,
    pub alpha: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub seed: u64,
    pub split_seed: u64,
    pub hf_seed: u64,
    pub matching_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionAudit {
    pub requested: usize,
    pub achieved: usize,
    pub shortfall: bool,
    pub cliques: usize,
    pub max_edge_load: f64,
    pub max_decrement_error: f64,
    pub rounds: Vec<RoundReport>,
    pub parts: Vec<PartReport>,
    /// Sparse mode: for every clique, at most one factor is positive on it.
    pub single_factor_per_clique: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfAudit {
    pub hyperedges: usize,
    /// `Σ_T f(T) = ℓ n / t` for a full bundle.
    pub expected_hyperedges: f64,
    pub concentration: ConcentrationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingAudit {
    pub mode: MatchMode,
    pub nibble_uncovered: usize,
    pub augment: Option<AugmentReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageAudits {
    pub spectral: SpectralCert,
    pub hypothesis: HypothesisReport,
    pub extraction: ExtractionAudit,
    pub split: Option<SplitReport>,
    pub hf: HfAudit,
    pub matching: MatchingAudit,
}

/// `n^{1 − 1/(8t⁴)}`, the asymptotic leftover bound, for comparison only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeftoverBound {
    pub bound: f64,
    /// True when the bound allows at least `n − t` uncovered vertices.
    pub vacuous: bool,
    pub met: bool,
}

/// Parameters of the final matching step, recorded but not consumed by the
/// nibble implementation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingTheoremWiring {
    pub delta_prime: f64,
    pub gamma: f64,
    /// `1 + 3 ln n`, the codegree bound `C`.
    pub codegree: f64,
    /// `(1 + (k/2)√(ln ℓ/ℓ)) ℓ`, the degree bound `D`.
    pub degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub parameters: Parameters,
    pub audits: StageAudits,
    pub result: MatchingResult,
    pub uncovered_fraction: f64,
    pub leftover_bound: LeftoverBound,
    pub theorem_wiring: MatchingTheoremWiring,
}

impl PipelineReport {
    /// True when the spectral and degree hypotheses hold for some branch.
    pub fn hypotheses_hold(&self) -> bool {
        self.audits.hypothesis.verdict != Branch::Fails
    }
}

/// `max(2, ⌊n^β⌋)`.
pub fn default_ell(n: usize, t: usize) -> usize {
    let beta = BranchExponents::for_order(t).beta;
    ((n as f64).powf(beta).floor() as usize).max(2)
}

pub fn leftover_bound(n: usize, t: usize, uncovered: usize) -> LeftoverBound {
    let bound = (n as f64).powf(1.0 - 1.0 / (8.0 * (t as f64).powi(4)));
    LeftoverBound {
        bound,
        vacuous: bound >= n.saturating_sub(t) as f64,
        met: uncovered as f64 <= bound,
    }
}

fn resolve_mode(choice: ModeChoice, hyp: &HypothesisReport) -> Mode {
    match choice {
        ModeChoice::Dense => Mode::Dense,
        ModeChoice::Sparse => Mode::Sparse,
        ModeChoice::Auto => match hyp.verdict {
            Branch::DenseBranch | Branch::Both => Mode::Dense,
            Branch::SparseBranch => Mode::Sparse,
            Branch::Fails => {
                if hyp.dense_degree_ok {
                    Mode::Dense
                } else {
                    Mode::Sparse
                }
            }
        },
    }
}

pub fn run_end_to_end(g: &Graph, config: &PipelineConfig) -> Result<PipelineReport> {
    let t = config.t;
    let n = g.n();
    let cert = spectral::second_eigenvalue(g, 1e-6).map_err(|e| e.in_stage("spectral"))?;
    let hypothesis = spectral::hypothesis_check(&cert, t).map_err(|e| e.in_stage("spectral"))?;
    let d = cert.d;
    let mode = resolve_mode(config.mode, &hypothesis);
    let ell = config.ell.unwrap_or_else(|| default_ell(n, t));
    let alpha = config.alpha.unwrap_or_else(|| default_alpha(n, d, t));
    let split_seed = rng::derive_seed(config.seed, 1);
    let hf_seed = rng::derive_seed(config.seed, 2);
    let matching_seed = rng::derive_seed(config.seed, 3);

    let bundle = match mode {
        Mode::Dense => dense_extract(g, t, ell, Some(alpha), config.tol),
        Mode::Sparse => sparse_extract(g, t, ell, split_seed, config.tol),
    }
    .map_err(|e| e.in_stage("extraction"))?;
    if bundle.max_edge_load() > 1.0 + config.tol {
        return Err(Error::Invariant(format!("aggregate pair load {} exceeds 1", bundle.max_edge_load())).in_stage("extraction"));
    }
    let single_factor_per_clique = (0..bundle.cliques.len())
        .all(|id| bundle.factors.iter().filter(|f| f[id] > config.tol).count() <= 1);
    let extraction = ExtractionAudit {
        requested: ell,
        achieved: bundle.ell(),
        shortfall: bundle.ell() < ell,
        cliques: bundle.cliques.len(),
        max_edge_load: bundle.max_edge_load(),
        max_decrement_error: bundle
            .rounds
            .iter()
            .map(|r| r.max_decrement_error)
            .fold(0.0, f64::max),
        rounds: bundle.rounds.clone(),
        parts: bundle.parts.clone(),
        single_factor_per_clique,
    };

    let hf = build_hf(&bundle, config.tol, hf_seed).map_err(|e| e.in_stage("hypergraph"))?;
    let concentration = concentration_audit(&hf, ell, n);
    let hf_audit = HfAudit {
        hyperedges: hf.hyperedges.len(),
        expected_hyperedges: hf.inclusion_prob.iter().sum(),
        concentration,
    };

    let nibble =
        nibble_matching(&hf, config.matcher, config.epsilon, matching_seed).map_err(|e| e.in_stage("matching"))?;
    let nibble_uncovered = nibble.uncovered_count;
    let (result, augment) = if config.augment_budget > 0 {
        let (r, a) = augment_matching(&hf, &nibble, config.augment_budget);
        (r, Some(a))
    } else {
        (nibble, None)
    };
    if !result.is_consistent(n) {
        return Err(Error::Invariant("matching is not vertex-disjoint".into()).in_stage("matching"));
    }

    let beta = BranchExponents::for_order(t).beta;
    let k = 8.0 / beta.sqrt();
    let l = ell as f64;
    let theorem_wiring = MatchingTheoremWiring {
        delta_prime: 1.0 / t as f64,
        gamma: 0.9,
        codegree: 1.0 + 3.0 * (n as f64).ln(),
        degree: (1.0 + k / 2.0 * (l.ln() / l).sqrt()) * l,
    };
    let uncovered_fraction = if n == 0 {
        0.0
    } else {
        result.uncovered_count as f64 / n as f64
    };
    Ok(PipelineReport {
        parameters: Parameters {
            n,
            d,
            t,
            lambda: cert.lambda,
            ell,
            mode_requested: config.mode,
            mode,
            alpha,
            epsilon: config.epsilon,
            tol: config.tol,
            seed: config.seed,
            split_seed,
            hf_seed,
            matching_seed,
        },
        audits: StageAudits {
            spectral: cert,
            hypothesis,
            extraction,
            split: bundle.split.clone(),
            hf: hf_audit,
            matching: MatchingAudit {
                mode: config.matcher,
                nibble_uncovered,
                augment,
            },
        },
        leftover_bound: leftover_bound(n, t, result.uncovered_count),
        uncovered_fraction,
        result,
        theorem_wiring,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques;
    use crate::gen;

    fn bundle_from(g: &Graph, t: usize, factors: Vec<Vec<f64>>) -> FactorBundle {
        let cl = cliques::enumerate_cliques(g, t).unwrap();
        let mut per_edge_load = vec![0.0; g.m()];
        for f in &factors {
            for (acc, x) in per_edge_load.iter_mut().zip(lp::pair_loads(g, &cl, f)) {
                *acc += x;
            }
        }
        FactorBundle {
            t,
            mode: Mode::Dense,
            requested: factors.len(),
            cliques: cl,
            factors,
            per_edge_load,
            rounds: Vec::new(),
            parts: Vec::new(),
            split: None,
        }
    }

    #[test]
    fn deterministic_hf_examples() {
        let k6 = gen::complete(6).unwrap();
        let cl = cliques::enumerate_cliques(&k6, 3).unwrap();
        let mut f = vec![0.0; cl.len()];
        f[cl.find(&[0, 1, 2]).unwrap()] = 1.0;
        f[cl.find(&[3, 4, 5]).unwrap()] = 1.0;
        let hf = build_hf(&bundle_from(&k6, 3, vec![f]), 1e-7, 5).unwrap();
        assert_eq!(hf.hyperedges, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let r = concentration_audit(&hf, 1, 6);
        assert!(!r.applicable);

        let hf = build_hf(&bundle_from(&k6, 3, vec![vec![0.0; 20]]), 1e-7, 5).unwrap();
        assert!(hf.hyperedges.is_empty());
        let r = concentration_audit(&hf, 2, 6);
        assert_eq!(r.zero_degree_count, 6);
        assert!(r.flagged);
    }

    #[test]
    fn overweight_clique_is_rejected() {
        let k6 = gen::complete(6).unwrap();
        let mut f = vec![0.0; 20];
        f[0] = 1.5;
        assert!(matches!(
            build_hf(&bundle_from(&k6, 3, vec![f]), 1e-7, 0),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn matching_examples() {
        let k6 = gen::complete(6).unwrap();
        let hf = build_hf(&bundle_from(&k6, 3, vec![vec![1.0; 20]]), 1e-7, 0).unwrap();
        assert_eq!(hf.hyperedges.len(), 20);
        for seed in 0..10 {
            let m = nibble_matching(&hf, MatchMode::Greedy, 0.1, seed).unwrap();
            assert_eq!((m.matched.len(), m.uncovered_count), (2, 0));
        }

        let single = RandomHypergraph {
            t: 3,
            vertices: 9,
            hyperedges: vec![vec![2, 4, 7]],
            source_ids: vec![0],
            inclusion_prob: vec![1.0],
        };
        for mode in [MatchMode::Greedy, MatchMode::Nibble] {
            let m = nibble_matching(&single, mode, 0.1, 1).unwrap();
            assert_eq!(m.uncovered_count, 6);
            assert!(m.is_consistent(9));
        }
        let empty = RandomHypergraph {
            hyperedges: Vec::new(),
            source_ids: Vec::new(),
            ..single
        };
        assert_eq!(nibble_matching(&empty, MatchMode::Nibble, 0.1, 1).unwrap().uncovered_count, 9);
        assert!(nibble_matching(&empty, MatchMode::Nibble, 1.0, 1).is_err());
    }

    #[test]
    fn leftover_bound_is_vacuous_at_desk_scale() {
        let b = leftover_bound(60, 3, 0);
        assert!((b.bound - 60f64.powf(1.0 - 1.0 / 648.0)).abs() < 1e-12);
        assert!((b.bound - 59.6).abs() < 0.05);
        assert!(b.vacuous);
    }

    #[test]
    fn petersen_run_covers_nothing() {
        let r = run_end_to_end(&gen::petersen(), &PipelineConfig::new(3, 7)).unwrap();
        assert_eq!(r.result.uncovered_count, 10);
        assert_eq!(r.audits.extraction.achieved, 0);
        assert!(!r.hypotheses_hold());
        assert_eq!(r.uncovered_fraction, 1.0);
    }

    #[test]
    fn complete_graph_dense_run() {
        let g = gen::complete(30).unwrap();
        let mut cfg = PipelineConfig::new(3, 1);
        cfg.mode = ModeChoice::Dense;
        cfg.ell = Some(2);
        let r = run_end_to_end(&g, &cfg).unwrap();
        assert_eq!(r.audits.extraction.achieved, 2);
        assert!(r.result.is_consistent(30));
        assert_eq!(r, run_end_to_end(&g, &cfg).unwrap());
    }
}
