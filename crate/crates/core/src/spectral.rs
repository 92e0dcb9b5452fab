//! Second adjacency eigenvalue, expander-mixing audits, and the degree /
//! eigenvalue thresholds that decide which extraction branch applies.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Graphs above this size use deflated power iteration instead of a dense
/// symmetric eigendecomposition.
pub const DENSE_LIMIT: usize = 2000;

/// Slack added to the right-hand side of the mixing inequality.
pub const MIXING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    DenseEig,
    PowerIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCert {
    pub n: usize,
    pub d: usize,
    /// `max_{i >= 2} |μ_i|`.
    pub lambda: f64,
    pub method: EigenMethod,
    /// Residual norm of the eigenpair that attains `lambda`.
    pub residual: f64,
    pub tol: f64,
    /// Second-largest eigenvalue `μ_2` (dense method only).
    pub mu_second: Option<f64>,
    /// Smallest eigenvalue `μ_n` (dense method only).
    pub mu_min: Option<f64>,
    /// `lambda` is within `tol` of `d`: the graph is disconnected or bipartite.
    pub degenerate: bool,
}

pub fn second_eigenvalue(g: &Graph, tol: f64) -> Result<SpectralCert> {
    let method = if g.n() <= DENSE_LIMIT {
        EigenMethod::DenseEig
    } else {
        EigenMethod::PowerIter
    };
    second_eigenvalue_with(g, tol, method)
}

/// Like [`second_eigenvalue`] but with an explicit method.
pub fn second_eigenvalue_with(g: &Graph, tol: f64, method: EigenMethod) -> Result<SpectralCert> {
    // written this way so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tol > 0.0) {
        return Err(Error::param("eigenvalue tolerance must be positive"));
    }
    let d = g.regular_degree()?;
    let n = g.n();
    if n <= 1 {
        return Ok(SpectralCert {
            n,
            d,
            lambda: 0.0,
            method,
            residual: 0.0,
            tol,
            mu_second: None,
            mu_min: None,
            degenerate: false,
        });
    }
    let mut cert = match method {
        EigenMethod::DenseEig => dense_lambda(g, d)?,
        EigenMethod::PowerIter => power_lambda(g, d, tol)?,
    };
    cert.tol = tol;
    cert.degenerate = (d as f64 - cert.lambda).abs() <= tol;
    if cert.residual > tol {
        return Err(Error::Numerical(format!(
            "eigenpair residual {:.3e} exceeds tolerance {tol:.1e}",
            cert.residual
        )));
    }
    Ok(cert)
}

fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

fn dense_lambda(g: &Graph, d: usize) -> Result<SpectralCert> {
    let a = adjacency(g);
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let second = order[1];
    let last = order[g.n() - 1];
    let (mu2, mun) = (eig.eigenvalues[second], eig.eigenvalues[last]);
    let witness = if mu2.abs() >= mun.abs() { second } else { last };
    let x = eig.eigenvectors.column(witness).into_owned();
    let mu = eig.eigenvalues[witness];
    let residual = (&a * &x - &x * mu).norm();
    Ok(SpectralCert {
        n: g.n(),
        d,
        lambda: mu.abs(),
        method: EigenMethod::DenseEig,
        residual,
        tol: 0.0,
        mu_second: Some(mu2),
        mu_min: Some(mun),
        degenerate: false,
    })
}

fn apply(g: &Graph, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        g.n(),
        (0..g.n()).map(|v| g.neighbors(v).iter().map(|&u| x[u]).sum::<f64>()),
    )
}

fn deflate(x: &mut DVector<f64>) {
    let mean = x.mean();
    x.add_scalar_mut(-mean);
}

/// Power iteration on the complement of the all-ones eigenvector.
///
/// Iterating `A` on `1^⊥` converges in direction to the span of the
/// eigenvectors for `±λ`, and `‖A x‖` to `λ`, so the pair `(λ², x)` is checked
/// against `A²`.
fn power_lambda(g: &Graph, d: usize, tol: f64) -> Result<SpectralCert> {
    const MAX_ITERS: usize = 200_000;
    let n = g.n();
    let mut rng = rng::seeded(0x5eed);
    let mut x = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
    deflate(&mut x);
    if x.norm() == 0.0 {
        return Err(Error::Numerical("degenerate start vector".into()));
    }
    x /= x.norm();
    // Iterating with A² targets max(|μ2|, |μn|) even when both signs tie.
    for _ in 0..MAX_ITERS {
        let mut ax = apply(g, &x);
        deflate(&mut ax);
        let mut y = apply(g, &ax);
        deflate(&mut y);
        let norm = y.norm();
        if norm == 0.0 {
            // A vanishes on 1^⊥ (e.g. an empty graph).
            return Ok(power_cert(g, d, 0.0, 0.0));
        }
        let rayleigh = x.dot(&y);
        let lambda = rayleigh.max(0.0).sqrt();
        let residual = (&y - &x * rayleigh).norm() / lambda.max(1.0);
        if residual <= 0.1 * tol {
            return Ok(power_cert(g, d, lambda, residual));
        }
        x = y / norm;
    }
    Err(Error::Numerical(format!(
        "power iteration did not converge in {MAX_ITERS} steps"
    )))
}

fn power_cert(g: &Graph, d: usize, lambda: f64, residual: f64) -> SpectralCert {
    SpectralCert {
        n: g.n(),
        d,
        lambda,
        method: EigenMethod::PowerIter,
        residual,
        tol: 0.0,
        mu_second: None,
        mu_min: None,
        degenerate: false,
    }
}

/// Ordered incidence count `e(A, B)`; edges inside `A ∩ B` count twice.
pub fn edges_between(g: &Graph, a: &[usize], b: &[usize]) -> usize {
    let mut in_b = vec![false; g.n()];
    for &v in b {
        in_b[v] = true;
    }
    a.iter()
        .map(|&u| g.neighbors(u).iter().filter(|&&v| in_b[v]).count())
        .sum()
}

/// `|e(A,B) − (d/n)|A||B|| − λ √(|A||B|)`; negative when the mixing bound holds.
pub fn mixing_excess(g: &Graph, d: usize, lambda: f64, a: &[usize], b: &[usize]) -> f64 {
    let n = g.n() as f64;
    let (sa, sb) = (a.len() as f64, b.len() as f64);
    let e = edges_between(g, a, b) as f64;
    (e - d as f64 / n * sa * sb).abs() - lambda * (sa * sb).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingAuditReport {
    pub samples: usize,
    /// Largest `excess − slack` over the sampled pairs; positive means a violation.
    pub max_violation: f64,
    pub slack: f64,
    pub violated: bool,
    /// Sizes `(|A|, |B|)` of the pair attaining `max_violation`.
    pub worst_sizes: Option<(usize, usize)>,
}

/// Samples `num_samples` pairs of uniformly random subsets and checks the
/// expander mixing inequality against `cert.lambda`.
pub fn mixing_audit(
    g: &Graph,
    cert: &SpectralCert,
    num_samples: usize,
    seed: u64,
) -> MixingAuditReport {
    let n = g.n();
    let worst = (0..num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let ka = rng.gen_range(1..=n);
            let kb = rng.gen_range(1..=n);
            let a = index::sample(&mut rng, n, ka).into_vec();
            let b = index::sample(&mut rng, n, kb).into_vec();
            let excess = mixing_excess(g, cert.d, cert.lambda, &a, &b) - MIXING_SLACK;
            (excess, (ka, kb))
        })
        .reduce_with(|x, y| if y.0 > x.0 { y } else { x });
    let (max_violation, worst_sizes) = match worst {
        Some((v, sizes)) => (v, Some(sizes)),
        None => (f64::NEG_INFINITY, None),
    };
    MixingAuditReport {
        samples: num_samples,
        max_violation: if num_samples == 0 { -MIXING_SLACK } else { max_violation },
        slack: MIXING_SLACK,
        violated: max_violation > 0.0,
        worst_sizes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloorCheck {
    Pass,
    Fail,
    NotApplicable,
}

/// `λ >= √(d/2)` for regular graphs with `d <= n/2`.
pub fn lambda_floor_check(cert: &SpectralCert) -> FloorCheck {
    if 2 * cert.d > cert.n {
        return FloorCheck::NotApplicable;
    }
    if cert.lambda >= (cert.d as f64 / 2.0).sqrt() - cert.tol {
        FloorCheck::Pass
    } else {
        FloorCheck::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    DenseBranch,
    SparseBranch,
    Both,
    Fails,
}

/// Exponents tying the dense and sparse branches together for a clique order `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchExponents {
    /// `1 / ((4t² + 1)(2t − 3))`.
    pub beta: f64,
    /// `4t² / ((4t² + 1)(2t − 3))`.
    pub delta: f64,
}

impl BranchExponents {
    pub fn for_order(t: usize) -> Self {
        let t2 = (t * t) as f64;
        let denom = (4.0 * t2 + 1.0) * (2.0 * t as f64 - 3.0);
        BranchExponents {
            beta: 1.0 / denom,
            delta: 4.0 * t2 / denom,
        }
    }
}

/// `1 / (50 t 4^{t−2})`.
pub fn lambda_constant(t: usize) -> f64 {
    1.0 / (50.0 * t as f64 * 4f64.powi(t as i32 - 2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub t: usize,
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub constant: f64,
    /// `c · d^{t−1} / n^{t−2}`.
    pub lambda_bound: f64,
    pub lambda_ok: bool,
    pub beta: f64,
    pub delta: f64,
    /// `n^{1 − 1/(2t−3) + β}`.
    pub dense_threshold: f64,
    pub dense_degree_ok: bool,
    /// `n^{1 − δ}`.
    pub sparse_threshold: f64,
    pub sparse_degree_ok: bool,
    /// `n^{1 − 1/(2t−3)} / 2`, as stated.
    pub degree_floor: f64,
    /// `n^{1 − 1/(2t−3)} / 2^{1/(2t−3)}`, the sharper form the argument yields.
    pub degree_floor_sharp: f64,
    pub verdict: Branch,
}

pub fn hypothesis_check(cert: &SpectralCert, t: usize) -> Result<HypothesisReport> {
    if t < 3 {
        return Err(Error::param("clique order t must be at least 3"));
    }
    let n = cert.n as f64;
    let d = cert.d as f64;
    let constant = lambda_constant(t);
    let lambda_bound = constant * d.powi(t as i32 - 1) / n.powi(t as i32 - 2);
    let lambda_ok = cert.lambda <= lambda_bound;
    let BranchExponents { beta, delta } = BranchExponents::for_order(t);
    let inv = 1.0 / (2.0 * t as f64 - 3.0);
    let dense_threshold = n.powf(1.0 - inv + beta);
    let sparse_threshold = n.powf(1.0 - delta);
    let dense_degree_ok = d >= dense_threshold;
    let sparse_degree_ok = d <= sparse_threshold;
    let verdict = match (lambda_ok && dense_degree_ok, lambda_ok && sparse_degree_ok) {
        (true, true) => Branch::Both,
        (true, false) => Branch::DenseBranch,
        (false, true) => Branch::SparseBranch,
        (false, false) => Branch::Fails,
    };
    Ok(HypothesisReport {
        t,
        n: cert.n,
        d: cert.d,
        lambda: cert.lambda,
        constant,
        lambda_bound,
        lambda_ok,
        beta,
        delta,
        dense_threshold,
        dense_degree_ok,
        sparse_threshold,
        sparse_degree_ok,
        degree_floor: n.powf(1.0 - inv) / 2.0,
        degree_floor_sharp: n.powf(1.0 - inv) / 2f64.powf(inv),
        verdict,
    })
}
