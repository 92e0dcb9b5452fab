//! The fractional `K_t`-matching programme of a weighted graph and its dual.
//!
//! Primal: maximise `Σ_T f(T)` over cliques `T`, with vertex loads
//! `Σ_{T∋v} f(T) ≤ 1` and pair loads `Σ_{T⊇uv} f(T) ≤ w(uv)`.
//! Dual: minimise `Σ_v g(v) + Σ_uv h(uv) w(uv)` subject to
//! `Σ_{v∈T} g(v) + Σ_{uv⊆T} h(uv) ≥ 1` for every clique.
//!
//! Before solving, cliques through a zero-weight edge are fixed at zero and
//! pair rows with `w(uv) = 1` are dropped: a pair load never exceeds the
//! load of either endpoint, so those rows are implied by the vertex rows.

mod simplex;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::cliques::{self, CliqueSet, PropertyPReport, SpanAuditReport};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::packing;
use crate::rng;
use crate::scalar::Scalar;
use crate::weighted::WeightedGraph;
use simplex::{LinearProgram, LpOutcome, RowKind};

pub const DEFAULT_TOL: f64 = 1e-7;

/// Clique count above which [`integral_matching_value`] refuses to search.
pub const INTEGRAL_CLIQUE_LIMIT: usize = 10_000;

const PACKING_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalSolution<S> {
    /// Weight per clique id.
    pub f: Vec<S>,
    pub objective: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSolution<S> {
    /// Weight per vertex.
    pub g: Vec<S>,
    /// Weight per edge id.
    pub h: Vec<S>,
    pub objective: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpForm {
    Primal,
    Dual,
}

/// An optimal primal/dual pair, certified against each other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvedPair<S> {
    pub primal: PrimalSolution<S>,
    pub dual: DualSolution<S>,
    /// Which programme the simplex actually ran on.
    pub form: LpForm,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorCert<S> {
    pub has_factor: bool,
    pub t_star: S,
    /// `|V|/t − t*`.
    pub slack: S,
    pub per_vertex_load: Vec<S>,
    /// The factor when one exists, otherwise an optimal fractional matching.
    pub f: Vec<S>,
}

fn clique_edges(g: &Graph, c: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(c.len() * (c.len() - 1) / 2);
    for (i, &u) in c.iter().enumerate() {
        for &v in &c[i + 1..] {
            out.push(g.edge_id(u, v).expect("clique pair is an edge"));
        }
    }
    out
}

fn check_cliques<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet) -> Result<()> {
    if cliques.n() != wg.n() {
        return Err(Error::VertexCountMismatch {
            left: wg.n(),
            right: cliques.n(),
        });
    }
    Ok(())
}

/// Rows and columns that survive presolve.
struct Reduced {
    /// Active clique ids with their edge ids.
    active: Vec<(usize, Vec<usize>)>,
    vertex_row: Vec<Option<usize>>,
    vertices: Vec<usize>,
    edge_row: Vec<Option<usize>>,
    edges: Vec<usize>,
    /// Zero-weight edges lying in some clique.
    blocked_edges: Vec<usize>,
}

impl Reduced {
    fn new<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, keep_unit_rows: bool) -> Reduced {
        Reduced::restricted(wg, cliques, keep_unit_rows, None)
    }

    /// As [`Reduced::new`], ignoring cliques that touch a vertex outside `alive`.
    fn restricted<S: Scalar>(
        wg: &WeightedGraph<S>,
        cliques: &CliqueSet,
        keep_unit_rows: bool,
        alive: Option<&[bool]>,
    ) -> Reduced {
        let g = wg.base();
        let mut active = Vec::new();
        let mut blocked = vec![false; g.m()];
        let mut vertex_used = vec![false; g.n()];
        let mut edge_used = vec![false; g.m()];
        for id in 0..cliques.len() {
            let c = cliques.clique(id);
            if alive.is_some_and(|a| c.iter().any(|&v| !a[v])) {
                continue;
            }
            let es = clique_edges(g, c);
            let zero: Vec<usize> = es.iter().copied().filter(|&e| *wg.weight_of(e) <= S::zero()).collect();
            if !zero.is_empty() {
                for e in zero {
                    blocked[e] = true;
                }
                continue;
            }
            for &v in c {
                vertex_used[v] = true;
            }
            for &e in &es {
                edge_used[e] = true;
            }
            active.push((id, es));
        }
        let vertices: Vec<usize> = (0..g.n()).filter(|&v| vertex_used[v]).collect();
        let mut vertex_row = vec![None; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            vertex_row[v] = Some(i);
        }
        let edges: Vec<usize> = (0..g.m())
            .filter(|&e| edge_used[e] && (keep_unit_rows || *wg.weight_of(e) < S::one()))
            .collect();
        let mut edge_row = vec![None; g.m()];
        for (i, &e) in edges.iter().enumerate() {
            edge_row[e] = Some(i);
        }
        Reduced {
            active,
            vertex_row,
            vertices,
            edge_row,
            edges,
            blocked_edges: (0..g.m()).filter(|&e| blocked[e]).collect(),
        }
    }

    fn primal_rows(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    /// Column of clique `T` in the primal programme: vertex rows first,
    /// then edge rows offset by `|vertices|`.
    fn primal_column<S: Scalar>(&self, clique: &[usize], edges: &[usize]) -> Vec<(usize, S)> {
        let nv = self.vertices.len();
        let mut col: Vec<(usize, S)> = clique
            .iter()
            .map(|&v| (self.vertex_row[v].expect("active vertex"), S::one()))
            .collect();
        col.extend(
            edges
                .iter()
                .filter_map(|&e| self.edge_row[e])
                .map(|r| (nv + r, S::one())),
        );
        col
    }
}

fn max_iterations(rows: usize, cols: usize) -> usize {
    50 * (rows + cols) + 1000
}

fn lp_outcome<S: Scalar>(outcome: LpOutcome<S>, what: &str) -> Result<simplex::LpSolution<S>> {
    match outcome {
        LpOutcome::Optimal(s) => Ok(s),
        LpOutcome::Infeasible => Err(Error::Numerical(format!("{what} reported infeasible"))),
    }
}

fn clamp_nonneg<S: Scalar>(x: S) -> S {
    if x < S::zero() {
        S::zero()
    } else {
        x
    }
}

/// `Σ_{T∋v} f(T)` for every vertex.
pub fn vertex_loads<S: Scalar>(cliques: &CliqueSet, f: &[S]) -> Vec<S> {
    let mut load = vec![S::zero(); cliques.n()];
    for (id, x) in f.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &v in cliques.clique(id) {
            load[v] = load[v].clone() + x.clone();
        }
    }
    load
}

/// `Σ_{T⊇uv} f(T)` for every edge id of `g`.
pub fn pair_loads<S: Scalar>(g: &Graph, cliques: &CliqueSet, f: &[S]) -> Vec<S> {
    let mut load = vec![S::zero(); g.m()];
    for (id, x) in f.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for e in clique_edges(g, cliques.clique(id)) {
            load[e] = load[e].clone() + x.clone();
        }
    }
    load
}

fn dual_objective<S: Scalar>(wg: &WeightedGraph<S>, g: &[S], h: &[S]) -> S {
    let gs = g.iter().fold(S::zero(), |a, x| a + x.clone());
    h.iter()
        .zip(wg.weights())
        .fold(gs, |a, (x, w)| a + x.clone() * w.clone())
}

fn clique_cover<S: Scalar>(wg: &WeightedGraph<S>, c: &[usize], g: &[S], h: &[S]) -> S {
    let gv = c.iter().fold(S::zero(), |a, &v| a + g[v].clone());
    clique_edges(wg.base(), c)
        .into_iter()
        .fold(gv, |a, e| a + h[e].clone())
}

/// Solves the programme in whichever form has fewer constraint rows.
pub fn solve_pair<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, tol: &S) -> Result<SolvedPair<S>> {
    solve_pair_in(wg, cliques, tol, None)
}

/// As [`solve_pair`], optionally forcing the form the simplex runs on.
pub fn solve_pair_in<S: Scalar>(
    wg: &WeightedGraph<S>,
    cliques: &CliqueSet,
    tol: &S,
    form: Option<LpForm>,
) -> Result<SolvedPair<S>> {
    check_cliques(wg, cliques)?;
    if *tol < S::zero() || (!S::is_exact() && tol.is_zero()) {
        return Err(Error::param("tolerance must be positive"));
    }
    let red = Reduced::new(wg, cliques, false);
    let form = form.unwrap_or(if red.active.len() < red.primal_rows() {
        LpForm::Dual
    } else {
        LpForm::Primal
    });
    let (f, mut g, mut h, iterations) = match form {
        LpForm::Primal => solve_primal_form(wg, cliques, &red)?,
        LpForm::Dual => solve_dual_form(wg, cliques, &red)?,
    };
    for &e in &red.blocked_edges {
        // zero weight: free in the objective, covers every clique through e
        h[e] = S::one();
    }
    if S::is_exact() {
        g.iter_mut().for_each(|x| *x = clamp_nonneg(x.clone()));
    }
    let p_obj = f.iter().fold(S::zero(), |a, x| a + x.clone());
    let d_obj = dual_objective(wg, &g, &h);
    let pair = SolvedPair {
        primal: PrimalSolution { f, objective: p_obj },
        dual: DualSolution {
            g,
            h,
            objective: d_obj,
        },
        form,
        iterations,
    };
    certify(wg, cliques, &pair, tol)?;
    Ok(pair)
}

type Raw<S> = (Vec<S>, Vec<S>, Vec<S>, usize);

fn solve_primal_form<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, red: &Reduced) -> Result<Raw<S>> {
    let g = wg.base();
    let mut rows: Vec<(RowKind, S)> = vec![(RowKind::Le, S::one()); red.vertices.len()];
    rows.extend(red.edges.iter().map(|&e| (RowKind::Le, wg.weight_of(e).clone())));
    let lp = LinearProgram {
        cols: red
            .active
            .iter()
            .map(|(id, es)| red.primal_column(cliques.clique(*id), es))
            .collect(),
        cost: vec![S::one(); red.active.len()],
        rows,
    };
    let sol = lp_outcome(
        simplex::solve(&lp, &S::zero(), max_iterations(lp.rows.len(), lp.cols.len()))?,
        "primal programme",
    )?;
    let mut f = vec![S::zero(); cliques.len()];
    for ((id, _), x) in red.active.iter().zip(sol.x) {
        f[*id] = clamp_nonneg(x);
    }
    let mut gv = vec![S::zero(); g.n()];
    for (i, &v) in red.vertices.iter().enumerate() {
        gv[v] = clamp_nonneg(sol.y[i].clone());
    }
    let mut h = vec![S::zero(); g.m()];
    for (i, &e) in red.edges.iter().enumerate() {
        h[e] = clamp_nonneg(sol.y[red.vertices.len() + i].clone());
    }
    Ok((f, gv, h, sol.iterations))
}

fn solve_dual_form<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, red: &Reduced) -> Result<Raw<S>> {
    let g = wg.base();
    let nv = red.vertices.len();
    let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); nv + red.edges.len()];
    for (row, (id, es)) in red.active.iter().enumerate() {
        for (r, a) in red.primal_column::<S>(cliques.clique(*id), es) {
            cols[r].push((row, a));
        }
    }
    let mut cost: Vec<S> = vec![-S::one(); nv];
    cost.extend(red.edges.iter().map(|&e| -wg.weight_of(e).clone()));
    let lp = LinearProgram {
        cols,
        cost,
        rows: vec![(RowKind::Ge, S::one()); red.active.len()],
    };
    let feas = if S::is_exact() { S::zero() } else { S::pivot_eps() };
    let sol = lp_outcome(
        simplex::solve(&lp, &feas, max_iterations(lp.rows.len(), lp.cols.len()))?,
        "dual programme",
    )?;
    let mut gv = vec![S::zero(); g.n()];
    for (i, &v) in red.vertices.iter().enumerate() {
        gv[v] = clamp_nonneg(sol.x[i].clone());
    }
    let mut h = vec![S::zero(); g.m()];
    for (i, &e) in red.edges.iter().enumerate() {
        h[e] = clamp_nonneg(sol.x[nv + i].clone());
    }
    let mut f = vec![S::zero(); cliques.len()];
    for ((id, _), y) in red.active.iter().zip(sol.y) {
        f[*id] = clamp_nonneg(-y);
    }
    Ok((f, gv, h, sol.iterations))
}

/// Checks primal and dual feasibility within `tol` and a gap of at most `2·tol`.
fn certify<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, pair: &SolvedPair<S>, tol: &S) -> Result<()> {
    let f = &pair.primal.f;
    for (v, load) in vertex_loads(cliques, f).iter().enumerate() {
        if *load > S::one() + tol.clone() {
            return Err(Error::Numerical(format!(
                "vertex {v} load {} exceeds 1",
                load.to_f64_lossy()
            )));
        }
    }
    for (e, load) in pair_loads(wg.base(), cliques, f).iter().enumerate() {
        if *load > wg.weight_of(e).clone() + tol.clone() {
            let (u, v) = wg.base().edges()[e];
            return Err(Error::Numerical(format!(
                "pair {u}-{v} load {} exceeds its weight",
                load.to_f64_lossy()
            )));
        }
    }
    let (g, h) = (&pair.dual.g, &pair.dual.h);
    for c in cliques.iter() {
        if clique_cover(wg, c, g, h) < S::one() - tol.clone() {
            return Err(Error::Numerical(format!("dual constraint of clique {c:?} violated")));
        }
    }
    let gap = (pair.primal.objective.clone() - pair.dual.objective.clone()).abs();
    if gap > tol.clone() + tol.clone() {
        return Err(Error::Numerical(format!(
            "duality gap {} exceeds 2·tol",
            gap.to_f64_lossy()
        )));
    }
    Ok(())
}

pub fn solve_primal<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, tol: &S) -> Result<PrimalSolution<S>> {
    Ok(solve_pair(wg, cliques, tol)?.primal)
}

pub fn solve_dual<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, tol: &S) -> Result<DualSolution<S>> {
    Ok(solve_pair(wg, cliques, tol)?.dual)
}

/// `t*(G, w)`: optimum of the fractional `K_t`-matching programme.
pub fn t_star<S: Scalar>(wg: &WeightedGraph<S>, t: usize, tol: &S) -> Result<S> {
    let cliques = cliques::enumerate_cliques(wg.base(), t)?;
    Ok(solve_pair(wg, &cliques, tol)?.primal.objective)
}

/// `t(G, w)`: the best vertex-disjoint clique family, each clique worth its
/// smallest edge weight. Exact branch and bound.
pub fn integral_matching_value(wg: &WeightedGraph<f64>, t: usize) -> Result<f64> {
    let cliques = cliques::enumerate_cliques(wg.base(), t)?;
    integral_matching_value_in(wg, &cliques)
}

pub fn integral_matching_value_in(wg: &WeightedGraph<f64>, cliques: &CliqueSet) -> Result<f64> {
    if cliques.len() > INTEGRAL_CLIQUE_LIMIT {
        return Err(Error::ResourceLimit {
            what: "exact clique packing (clique count)",
            limit: INTEGRAL_CLIQUE_LIMIT as u64,
            partial: cliques.len() as u64,
        });
    }
    let weights: Vec<f64> = cliques.iter().map(|c| wg.min_weight_on(c)).collect();
    let flat: Vec<usize> = cliques.iter().flatten().copied().collect();
    // 0/1 weights make every packing value an integer, so bounds may be floored
    let integral = weights.iter().all(|&w| w == 0.0 || w == 1.0);
    let p = packing::max_weight_packing(wg.n(), cliques.t(), &flat, &weights, integral, None, PACKING_NODE_BUDGET);
    if !p.optimal {
        return Err(Error::ResourceLimit {
            what: "exact clique packing (search nodes)",
            limit: PACKING_NODE_BUDGET,
            partial: p.nodes,
        });
    }
    Ok(p.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionCheck {
    pub subset: Vec<usize>,
    pub dual_feasible: bool,
    pub dual_value: f64,
    pub sub_t_star: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub threshold: f64,
    pub v1_size: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Report {
    pub t: usize,
    pub n: usize,
    pub t_star: f64,
    pub dual_objective: f64,
    pub integral_value: f64,
    pub n_over_t: f64,
    /// `t* ≥ t(G, w)`.
    pub lower_ok: bool,
    /// `t* ≤ |V|/t`.
    pub upper_ok: bool,
    /// The optimal dual restricted to a random `U`.
    pub restriction: RestrictionCheck,
    /// `V_1 = {v : g(v) > 10·tol}`.
    pub v1_size: usize,
    pub v1_ok: bool,
    pub v1_sweep: Vec<ThresholdPoint>,
    pub all_pass: bool,
}

/// Audits the four basic facts about `t*`: it dominates `t(G,w)`, is at most
/// `|V|/t`, an optimal dual restricts to feasible duals of induced
/// subgraphs, and it is at least `|V_1|/t` for the support `V_1` of `g`.
pub fn check_prop3(wg: &WeightedGraph<f64>, t: usize, tol: f64, seed: u64) -> Result<Prop3Report> {
    let cliques = cliques::enumerate_cliques(wg.base(), t)?;
    let pair = solve_pair(wg, &cliques, &tol)?;
    let ts = pair.primal.objective;
    let integral = integral_matching_value_in(wg, &cliques)?;
    let n = wg.n();
    let n_over_t = n as f64 / t as f64;

    let mut r = rng::stream(seed, 0);
    let subset: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
    let (sub, map) = wg.induced(&subset)?;
    let sub_cliques = cliques::enumerate_cliques(sub.base(), t)?;
    let g_sub: Vec<f64> = map.iter().map(|&v| pair.dual.g[v]).collect();
    let h_sub: Vec<f64> = sub
        .base()
        .edges()
        .iter()
        .map(|&(a, b)| pair.dual.h[wg.base().edge_id(map[a], map[b]).expect("induced edge")])
        .collect();
    let dual_feasible = sub_cliques
        .iter()
        .all(|c| clique_cover(&sub, c, &g_sub, &h_sub) >= 1.0 - tol);
    let dual_value = dual_objective(&sub, &g_sub, &h_sub);
    let sub_t_star = solve_pair(&sub, &sub_cliques, &tol)?.primal.objective;
    let restriction = RestrictionCheck {
        subset: map,
        dual_feasible,
        dual_value,
        sub_t_star,
        ok: dual_feasible && dual_value >= sub_t_star - tol,
    };

    let v1 = |threshold: f64| pair.dual.g.iter().filter(|&&x| x > threshold).count();
    let v1_sweep: Vec<ThresholdPoint> = [tol, 10.0 * tol, 100.0 * tol, 1e-3, 1e-2]
        .into_iter()
        .map(|threshold| {
            let size = v1(threshold);
            ThresholdPoint {
                threshold,
                v1_size: size,
                ok: ts >= size as f64 / t as f64 - tol,
            }
        })
        .collect();
    let v1_size = v1(10.0 * tol);
    let v1_ok = ts >= v1_size as f64 / t as f64 - tol;
    let lower_ok = ts >= integral - tol;
    let upper_ok = ts <= n_over_t + tol;
    Ok(Prop3Report {
        t,
        n,
        t_star: ts,
        dual_objective: pair.dual.objective,
        integral_value: integral,
        n_over_t,
        lower_ok,
        upper_ok,
        all_pass: lower_ok && upper_ok && restriction.ok && v1_ok,
        restriction,
        v1_size,
        v1_ok,
        v1_sweep,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlacknessReport {
    pub gap: f64,
    pub threshold: f64,
    /// Vertices with `g(v)` above the threshold, whose load must be 1.
    pub active_vertices: usize,
    /// Edges with `h(uv)` above the threshold, whose pair load must be `w(uv)`.
    pub active_edges: usize,
    /// Cliques with `f(T)` above the threshold, whose dual row must be tight.
    pub active_cliques: usize,
    pub worst_vertex_slack: f64,
    pub worst_edge_slack: f64,
    pub worst_clique_slack: f64,
    pub ok: bool,
}

/// Complementary slackness between a primal and a dual solution.
///
/// Refuses (numerical error) when the objectives differ by more than
/// `2·tol`, since the pair is then not certified optimal.
pub fn complementary_slackness<S: Scalar>(
    wg: &WeightedGraph<S>,
    cliques: &CliqueSet,
    p: &PrimalSolution<S>,
    d: &DualSolution<S>,
    tol: &S,
) -> Result<SlacknessReport> {
    check_cliques(wg, cliques)?;
    let gap = (p.objective.clone() - d.objective.clone()).abs();
    if gap > tol.clone() + tol.clone() {
        return Err(Error::Numerical(format!(
            "objective gap {} exceeds 2·tol; pair not certified optimal",
            gap.to_f64_lossy()
        )));
    }
    let ten = S::from_usize_lossless(10);
    let threshold = ten.clone() * tol.clone();
    let mut report = SlacknessReport {
        gap: gap.to_f64_lossy(),
        threshold: threshold.to_f64_lossy(),
        active_vertices: 0,
        active_edges: 0,
        active_cliques: 0,
        worst_vertex_slack: 0.0,
        worst_edge_slack: 0.0,
        worst_clique_slack: 0.0,
        ok: true,
    };
    for (v, load) in vertex_loads(cliques, &p.f).iter().enumerate() {
        if d.g[v] > threshold {
            report.active_vertices += 1;
            let s = (S::one() - load.clone()).abs().to_f64_lossy();
            report.worst_vertex_slack = report.worst_vertex_slack.max(s);
        }
    }
    for (e, load) in pair_loads(wg.base(), cliques, &p.f).iter().enumerate() {
        if d.h[e] > threshold {
            report.active_edges += 1;
            let s = (wg.weight_of(e).clone() - load.clone()).abs().to_f64_lossy();
            report.worst_edge_slack = report.worst_edge_slack.max(s);
        }
    }
    for (id, x) in p.f.iter().enumerate() {
        if *x > threshold {
            report.active_cliques += 1;
            let s = (clique_cover(wg, cliques.clique(id), &d.g, &d.h) - S::one())
                .abs()
                .to_f64_lossy();
            report.worst_clique_slack = report.worst_clique_slack.max(s);
        }
    }
    let limit = threshold.to_f64_lossy();
    report.ok = report.worst_vertex_slack <= limit
        && report.worst_edge_slack <= limit
        && report.worst_clique_slack <= limit;
    Ok(report)
}

pub fn has_fractional_factor<S: Scalar>(wg: &WeightedGraph<S>, t: usize, tol: &S) -> Result<FactorCert<S>> {
    let cliques = cliques::enumerate_cliques(wg.base(), t)?;
    fractional_factor_in(wg, &cliques, tol)
}

/// Decides whether `(G, w)` has a fractional `K_t`-factor: `t* ≥ |V|/t − tol`,
/// confirmed by solving the programme with every vertex load fixed to 1.
pub fn fractional_factor_in<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, tol: &S) -> Result<FactorCert<S>> {
    let pair = solve_pair(wg, cliques, tol)?;
    let ts = pair.primal.objective.clone();
    let n_over_t = S::from_usize_lossless(wg.n()) / S::from_usize_lossless(cliques.t());
    let slack = n_over_t.clone() - ts.clone();
    let mut cert = FactorCert {
        has_factor: false,
        t_star: ts.clone(),
        slack,
        per_vertex_load: vertex_loads(cliques, &pair.primal.f),
        f: pair.primal.f,
    };
    if ts < n_over_t - tol.clone() {
        return Ok(cert);
    }
    if let Some(f) = exact_load_factor(wg, cliques, tol)? {
        let loads = vertex_loads(cliques, &f);
        if let Some((v, l)) = loads
            .iter()
            .enumerate()
            .find(|(_, l)| (S::one() - (*l).clone()).abs() > tol.clone())
        {
            return Err(Error::Numerical(format!(
                "factor load at vertex {v} is {}",
                l.to_f64_lossy()
            )));
        }
        cert.has_factor = true;
        cert.per_vertex_load = loads;
        cert.f = f;
    }
    Ok(cert)
}

/// Basic feasible solution of `load(v) = 1` for all `v`, pair loads `≤ w`.
fn exact_load_factor<S: Scalar>(wg: &WeightedGraph<S>, cliques: &CliqueSet, tol: &S) -> Result<Option<Vec<S>>> {
    exact_load_factor_on(wg, cliques, tol, None)
}

/// As [`exact_load_factor`] for the subgraph induced by `alive`.
fn exact_load_factor_on<S: Scalar>(
    wg: &WeightedGraph<S>,
    cliques: &CliqueSet,
    tol: &S,
    alive: Option<&[bool]>,
) -> Result<Option<Vec<S>>> {
    let red = Reduced::restricted(wg, cliques, false, alive);
    let needed = alive.map_or(wg.n(), |a| a.iter().filter(|&&x| x).count());
    if red.vertices.len() < needed {
        return Ok(None);
    }
    let mut rows: Vec<(RowKind, S)> = vec![(RowKind::Eq, S::one()); red.vertices.len()];
    rows.extend(red.edges.iter().map(|&e| (RowKind::Le, wg.weight_of(e).clone())));
    let lp = LinearProgram {
        cols: red
            .active
            .iter()
            .map(|(id, es)| red.primal_column(cliques.clique(*id), es))
            .collect(),
        cost: vec![S::zero(); red.active.len()],
        rows,
    };
    let iters = max_iterations(lp.rows.len(), lp.cols.len());
    match simplex::solve(&lp, tol, iters)? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal(sol) => {
            let mut f = vec![S::zero(); cliques.len()];
            for ((id, _), x) in red.active.iter().zip(sol.x) {
                f[*id] = clamp_nonneg(x);
            }
            Ok(Some(f))
        }
    }
}

/// Makes a fractional factor as integral as the instance allows.
///
/// Starting from a basic factor, repeatedly fixes a clique to weight 1 and
/// re-solves the load-one programme on the vertices not yet covered. A
/// clique qualifies only when all its edges have weight 1 (so it can carry
/// load 1); candidates are tried heaviest first, at most `attempts` per
/// step, and a step is taken only when the rest still has a factor. The
/// result is a factor whose fixed cliques form a partial `K_t`-tiling.
/// Returns the factor and the number of fixed cliques, or `None` when
/// `(G, w)` has no fractional factor.
pub fn rounded_factor(
    wg: &WeightedGraph<f64>,
    cliques: &CliqueSet,
    tol: f64,
    attempts: usize,
) -> Result<Option<(Vec<f64>, usize)>> {
    check_cliques(wg, cliques)?;
    let Some(mut rest) = exact_load_factor(wg, cliques, &tol)? else {
        return Ok(None);
    };
    let mut alive = vec![true; wg.n()];
    let mut fixed: Vec<usize> = Vec::new();
    let unit = |id: usize| wg.min_weight_on(cliques.clique(id)) >= 1.0 - tol;
    loop {
        let mut cands: Vec<usize> = (0..cliques.len()).filter(|&id| rest[id] > tol && unit(id)).collect();
        if cands.is_empty() {
            break;
        }
        cands.sort_by(|&a, &b| rest[b].total_cmp(&rest[a]).then(a.cmp(&b)));
        let mut stepped = false;
        for &id in cands.iter().take(attempts) {
            let mut next_alive = alive.clone();
            for &v in cliques.clique(id) {
                next_alive[v] = false;
            }
            let next = if rest[id] >= 1.0 - tol {
                // already integral here: the rest of f is a factor of the rest
                let mut r = rest.clone();
                for &v in cliques.clique(id) {
                    for &other in cliques.containing_vertex(v) {
                        r[other] = 0.0;
                    }
                }
                Some(r)
            } else if next_alive.iter().any(|&x| x) {
                exact_load_factor_on(wg, cliques, &tol, Some(&next_alive))?
            } else {
                Some(vec![0.0; cliques.len()])
            };
            if let Some(r) = next {
                fixed.push(id);
                alive = next_alive;
                rest = r;
                stepped = true;
                break;
            }
        }
        if !stepped {
            break;
        }
    }
    for x in rest.iter_mut() {
        if *x <= tol {
            *x = 0.0;
        }
    }
    for &id in &fixed {
        rest[id] = 1.0;
    }
    Ok(Some((rest, fixed.len())))
}

/// A fractional factor minimising `θ = max_uv pairload(uv)/w(uv)`, the
/// most evenly spread factor in the weight-relative sense. Returns the
/// factor and `θ`, or `None` when no factor exists.
pub fn balanced_factor<S: Scalar>(
    wg: &WeightedGraph<S>,
    cliques: &CliqueSet,
    tol: &S,
) -> Result<Option<(Vec<S>, S)>> {
    check_cliques(wg, cliques)?;
    let red = Reduced::new(wg, cliques, true);
    if red.vertices.len() < wg.n() {
        return Ok(None);
    }
    let nv = red.vertices.len();
    let ne = red.edges.len();
    let mut cols: Vec<Vec<(usize, S)>> = red
        .active
        .iter()
        .map(|(id, es)| red.primal_column(cliques.clique(*id), es))
        .collect();
    let mut theta_col: Vec<(usize, S)> = red
        .edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (nv + i, -wg.weight_of(e).clone()))
        .collect();
    theta_col.push((nv + ne, S::one()));
    cols.push(theta_col);
    let mut cost = vec![S::zero(); red.active.len()];
    cost.push(-S::one());
    let mut rows: Vec<(RowKind, S)> = vec![(RowKind::Eq, S::one()); nv];
    rows.extend(std::iter::repeat_n((RowKind::Le, S::zero()), ne));
    rows.push((RowKind::Le, S::one()));
    let lp = LinearProgram { cols, cost, rows };
    let iters = max_iterations(lp.rows.len(), lp.cols.len());
    match simplex::solve(&lp, tol, iters)? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal(sol) => {
            let theta = sol.x[red.active.len()].clone();
            let mut f = vec![S::zero(); cliques.len()];
            for ((id, _), x) in red.active.iter().zip(sol.x) {
                f[*id] = clamp_nonneg(x);
            }
            Ok(Some((f, theta)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub t: usize,
    pub alpha: f64,
    pub d_param: usize,
    /// Edges of the rich subgraph `H`.
    pub rich_edges: usize,
    /// `⌈D/(t−1)⌉` rich cliques wanted through every vertex.
    pub family_target: usize,
    pub family_min: usize,
    pub short_vertices: Vec<usize>,
    pub families_ok: bool,
    pub span: SpanAuditReport,
    pub span_ok: bool,
    pub property_p: PropertyPReport,
    pub property_p_ok: bool,
    pub hypotheses_hold: bool,
    pub cert: FactorCert<f64>,
}

/// Audits the sufficient conditions for a fractional factor on the
/// `α`-rich subgraph `H`, then decides factor existence directly, so the two
/// can be compared.
pub fn corollary_ff_driver(
    wg: &WeightedGraph<f64>,
    t: usize,
    alpha: f64,
    d_param: usize,
    tol: f64,
    trials: usize,
    seed: u64,
) -> Result<CorollaryReport> {
    let n = wg.n();
    if t < 3 {
        return Err(Error::param("t must be at least 3"));
    }
    if !(0.0..1.0 / (7.0 * (t * t) as f64)).contains(&alpha) {
        return Err(Error::param(format!("alpha = {alpha} must lie in [0, 1/(7t²))")));
    }
    if d_param < 3 || 2 * d_param > n {
        return Err(Error::param(format!("D = {d_param} must satisfy 3 <= D <= n/2")));
    }
    let h = wg.rich_subgraph(&alpha)?;
    let family_target = d_param.div_ceil(t - 1);
    let sizes: Vec<usize> = (0..n)
        .map(|v| cliques::vertex_family_in(&h, v, t, family_target).cliques.len())
        .collect();
    let short_vertices: Vec<usize> = (0..n).filter(|&v| sizes[v] < family_target).collect();
    let span = cliques::span_clique_audit(&h, t, cliques::default_span_size(n, t), trials, rng::derive_seed(seed, 1))?;
    let property_p = cliques::property_p_audit(&h, t, d_param, n / 5, trials, rng::derive_seed(seed, 2))?;
    let cert = has_fractional_factor(wg, t, &tol)?;
    let families_ok = short_vertices.is_empty();
    let span_ok = span.failures == 0;
    let property_p_ok = property_p.failures == 0;
    Ok(CorollaryReport {
        t,
        alpha,
        d_param,
        rich_edges: h.m(),
        family_target,
        family_min: sizes.iter().copied().min().unwrap_or(0),
        short_vertices,
        families_ok,
        span,
        span_ok,
        property_p,
        property_p_ok,
        hypotheses_hold: families_ok && span_ok && property_p_ok,
        cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::Rational;

    fn unit(g: Graph) -> WeightedGraph<f64> {
        WeightedGraph::unit(g)
    }

    #[test]
    fn primal_examples() {
        let tol = DEFAULT_TOL;
        assert!((t_star(&unit(gen::complete(6).unwrap()), 3, &tol).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(t_star(&unit(gen::cycle(9).unwrap()), 3, &tol).unwrap(), 0.0);
        assert!((t_star(&unit(gen::complete(4).unwrap()), 3, &tol).unwrap() - 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(t_star(&unit(gen::petersen()), 3, &tol).unwrap(), 0.0);
    }

    #[test]
    fn k4_dual_is_uniform_third() {
        let wg = unit(gen::complete(4).unwrap());
        let cl = cliques::enumerate_cliques(wg.base(), 3).unwrap();
        for form in [LpForm::Primal, LpForm::Dual] {
            let pair = solve_pair_in(&wg, &cl, &DEFAULT_TOL, Some(form)).unwrap();
            assert!((pair.dual.objective - 4.0 / 3.0).abs() < 1e-9);
            assert!((pair.primal.objective - 4.0 / 3.0).abs() < 1e-9);
            // every vertex load must be 1 at any optimum
            for l in vertex_loads(&cl, &pair.primal.f) {
                assert!((l - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_k4_and_k5() {
        let k4 = WeightedGraph::<Rational>::unit(gen::complete(4).unwrap());
        let zero = Rational::from_integer(0.into());
        assert_eq!(t_star(&k4, 3, &zero).unwrap(), <Rational as Scalar>::ratio(4, 3));
        let k5 = WeightedGraph::<Rational>::unit(gen::complete(5).unwrap());
        let cert = has_fractional_factor(&k5, 3, &zero).unwrap();
        assert_eq!(cert.t_star, <Rational as Scalar>::ratio(5, 3));
        assert!(cert.has_factor);
        assert!(cert.per_vertex_load.iter().all(|l| *l == Rational::from_integer(1.into())));
    }

    #[test]
    fn forbidden_edge_keeps_k6_coverable() {
        let k6 = gen::complete(6).unwrap();
        let mut w = vec![1.0; 15];
        w[0] = 0.0;
        let wg = WeightedGraph::new(k6, w).unwrap();
        assert!((t_star(&wg, 3, &DEFAULT_TOL).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn integral_value_examples() {
        assert_eq!(integral_matching_value(&unit(gen::complete(6).unwrap()), 3).unwrap(), 2.0);
        assert_eq!(integral_matching_value(&unit(gen::complete(5).unwrap()), 3).unwrap(), 1.0);
        let tri = Graph::from_edge_list(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let wg = WeightedGraph::new(tri, vec![1.0, 0.3, 0.2]).unwrap();
        assert!((integral_matching_value(&wg, 3).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn prop3_examples() {
        for g in [gen::complete(6).unwrap(), gen::petersen(), gen::complete(4).unwrap()] {
            let r = check_prop3(&unit(g), 3, DEFAULT_TOL, 3).unwrap();
            assert!(r.all_pass, "{r:?}");
        }
        let r = check_prop3(&unit(gen::complete(4).unwrap()), 3, DEFAULT_TOL, 0).unwrap();
        assert_eq!(r.v1_size, 4);
        let r = check_prop3(&unit(gen::petersen()), 3, DEFAULT_TOL, 0).unwrap();
        assert_eq!((r.v1_size, r.t_star), (0, 0.0));
    }

    #[test]
    fn slackness_examples() {
        let wg = unit(gen::complete(6).unwrap());
        let cl = cliques::enumerate_cliques(wg.base(), 3).unwrap();
        let pair = solve_pair(&wg, &cl, &DEFAULT_TOL).unwrap();
        let r = complementary_slackness(&wg, &cl, &pair.primal, &pair.dual, &DEFAULT_TOL).unwrap();
        assert!(r.ok);

        let pet = unit(gen::petersen());
        let cl = cliques::enumerate_cliques(pet.base(), 3).unwrap();
        let pair = solve_pair(&pet, &cl, &DEFAULT_TOL).unwrap();
        let r = complementary_slackness(&pet, &cl, &pair.primal, &pair.dual, &DEFAULT_TOL).unwrap();
        assert!(r.ok && r.active_vertices == 0);

        let mut bad = pair.dual.clone();
        bad.objective += 1.0;
        assert!(complementary_slackness(&pet, &cl, &pair.primal, &bad, &DEFAULT_TOL).is_err());
    }

    #[test]
    fn factor_examples() {
        let cert = has_fractional_factor(&unit(gen::complete(6).unwrap()), 3, &DEFAULT_TOL).unwrap();
        assert!(cert.has_factor);
        assert!(cert.per_vertex_load.iter().all(|l| (l - 1.0).abs() < 1e-7));

        let cert = has_fractional_factor(&unit(gen::complete(5).unwrap()), 3, &DEFAULT_TOL).unwrap();
        assert!((cert.t_star - 5.0 / 3.0).abs() < 1e-9);
        assert!(cert.has_factor);

        let cert = has_fractional_factor(&unit(gen::petersen()), 3, &DEFAULT_TOL).unwrap();
        assert!(!cert.has_factor);
        assert!((cert.slack - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn half_weight_k6_still_has_a_factor() {
        // uniform f = 1/10 on all 20 triangles: loads 1, pair loads 0.4 <= 0.5
        let wg = WeightedGraph::uniform(gen::complete(6).unwrap(), 0.5).unwrap();
        let cert = has_fractional_factor(&wg, 3, &DEFAULT_TOL).unwrap();
        assert!((cert.t_star - 2.0).abs() < 1e-9);
        assert!(cert.has_factor);
        let cl = cliques::enumerate_cliques(wg.base(), 3).unwrap();
        let pl = pair_loads(wg.base(), &cl, &cert.f);
        assert!(pl.iter().all(|&x| x <= 0.5 + 1e-9));
    }

    #[test]
    fn balanced_factor_spreads_load() {
        let wg = unit(gen::complete(6).unwrap());
        let cl = cliques::enumerate_cliques(wg.base(), 3).unwrap();
        let (f, theta) = balanced_factor(&wg, &cl, &DEFAULT_TOL).unwrap().unwrap();
        assert!((theta - 0.4).abs() < 1e-9);
        assert!(pair_loads(wg.base(), &cl, &f).iter().all(|&x| x <= 0.4 + 1e-9));
        assert!(balanced_factor(&unit(gen::petersen()), &cliques::enumerate_cliques(&gen::petersen(), 3).unwrap(), &DEFAULT_TOL)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rounding_finds_triangle_tilings() {
        for n in [6, 9, 12, 30] {
            let wg = unit(gen::complete(n).unwrap());
            let cl = cliques::enumerate_cliques(wg.base(), 3).unwrap();
            let (f, fixed) = rounded_factor(&wg, &cl, DEFAULT_TOL, 5).unwrap().unwrap();
            assert_eq!(fixed, n / 3);
            assert!(vertex_loads(&cl, &f).iter().all(|l| (l - 1.0).abs() < 1e-9));
            assert!(f.iter().all(|&x| x == 0.0 || x == 1.0));
        }
        let half = WeightedGraph::uniform(gen::complete(6).unwrap(), 0.5).unwrap();
        let cl = cliques::enumerate_cliques(half.base(), 3).unwrap();
        let (f, fixed) = rounded_factor(&half, &cl, DEFAULT_TOL, 5).unwrap().unwrap();
        assert_eq!(fixed, 0);
        assert!(vertex_loads(&cl, &f).iter().all(|l| (l - 1.0).abs() < 1e-7));
    }

    #[test]
    fn corollary_examples() {
        let r = corollary_ff_driver(&unit(gen::complete(60).unwrap()), 3, 0.0, 6, DEFAULT_TOL, 20, 1).unwrap();
        assert!(r.hypotheses_hold && r.cert.has_factor, "{r:?}");
        let r = corollary_ff_driver(&unit(gen::petersen()), 3, 0.0, 3, DEFAULT_TOL, 20, 1).unwrap();
        assert!(!r.span_ok && !r.cert.has_factor);
        let half = WeightedGraph::uniform(gen::complete(6).unwrap(), 0.5).unwrap();
        let r = corollary_ff_driver(&half, 3, 0.01, 3, DEFAULT_TOL, 20, 1).unwrap();
        assert_eq!(r.rich_edges, 0);
        assert!(!r.hypotheses_hold);
        assert!(r.cert.has_factor);
        assert!(corollary_ff_driver(&half, 3, 0.1, 3, DEFAULT_TOL, 20, 1).is_err());
    }
}
