//! The acceptance criteria, each checked against independent oracles.
//!
//! A criterion that errors counts as failed, with the error in its detail.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use cfl_core::lp;
use cfl_core::pipeline::{self, MatchMode, ModeChoice, PipelineConfig};
use cfl_core::spectral::{self, FloorCheck};
use cfl_core::{cliques, gen, io, rng, Graph};

use crate::corpus;
use crate::oracle;
use crate::{to_canonical_json, CliError};

pub const ALL: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

const TOL: f64 = lp::DEFAULT_TOL;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u64,
}

/// One pipeline run of the coverage criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageRow {
    pub instance: String,
    pub seed: u64,
    pub ell_achieved: usize,
    pub uncovered_count: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionOutcome>,
    pub coverage: Vec<CoverageRow>,
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "LP duality suite",
        2 => "brute-force oracle equivalence",
        3 => "dense-extraction identity",
        4 => "spectral correctness",
        5 => "clique-count windows",
        6 => "pipeline coverage",
        7 => "sparse-split structure",
        8 => "H_f statistics",
        9 => "determinism",
        _ => "unknown",
    }
}

type Verdict = Result<(bool, String), CliError>;

/// Runs one criterion. `cfl` is the binary used by the determinism check;
/// without it the check runs in-process only.
pub fn run_one(id: u8, cfl: Option<&Path>, coverage: &mut Vec<CoverageRow>) -> CriterionOutcome {
    let start = Instant::now();
    let verdict = match id {
        1 => lp_duality(),
        2 => oracle_equivalence(),
        3 => dense_identity(),
        4 => spectral_correctness(),
        5 => clique_windows(),
        6 => pipeline_coverage(coverage),
        7 => sparse_split(),
        8 => hf_statistics(),
        9 => determinism(cfl),
        _ => Err(CliError::Input(format!("no acceptance criterion {id}"))),
    };
    let (passed, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        name: name(id),
        passed,
        detail,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn run(ids: &[u8], cfl: Option<&Path>) -> SuiteReport {
    let mut coverage = Vec::new();
    let criteria = ids.iter().map(|&id| run_one(id, cfl, &mut coverage)).collect();
    SuiteReport { criteria, coverage }
}

pub fn table(report: &SuiteReport) -> String {
    let mut out = String::new();
    for c in &report.criteria {
        let _ = writeln!(
            out,
            "criterion {} [{}] {}: {} ({} ms)",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail,
            c.elapsed_ms
        );
    }
    let passed = report.criteria.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} criteria passed", report.criteria.len());
    out
}

pub fn coverage_csv(rows: &[CoverageRow]) -> String {
    let mut out = String::from("instance,seed,ell_achieved,uncovered_count,runtime_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{}",
            r.instance, r.seed, r.ell_achieved, r.uncovered_count, r.runtime_ms
        );
    }
    out
}

fn lp_duality() -> Verdict {
    let start = Instant::now();
    let instances = corpus::lp_corpus()?;
    let results: Vec<Result<(String, f64, bool), CliError>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let cl = cliques::enumerate_cliques(inst.wg.base(), 3)?;
            let pair = lp::solve_pair(&inst.wg, &cl, &TOL)?;
            let gap = (pair.primal.objective - pair.dual.objective).abs();
            let p3 = lp::check_prop3(&inst.wg, 3, TOL, i as u64)?;
            Ok((inst.name.clone(), gap, p3.all_pass))
        })
        .collect();
    let mut max_gap = 0.0f64;
    let mut bad = Vec::new();
    for r in results {
        let (name, gap, p3) = r?;
        max_gap = max_gap.max(gap);
        if gap > 2e-7 || !p3 {
            bad.push(format!("{name} (gap {gap:.2e}, basic facts {})", if p3 { "ok" } else { "FAILED" }));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = bad.is_empty() && instances.len() >= 20 && secs < 60.0;
    Ok((
        ok,
        format!(
            "{} instances, max |primal-dual| {max_gap:.2e}, {} failing{}, {secs:.1} s (limit 60 s)",
            instances.len(),
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }
        ),
    ))
}

fn oracle_equivalence() -> Verdict {
    let small: Vec<_> = corpus::lp_corpus()?.into_iter().filter(|i| i.wg.n() <= 12).collect();
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for inst in &small {
        let ours = lp::t_star(&inst.wg, 3, &TOL)?;
        let theirs = oracle::minilp_t_star(&inst.wg, 3).map_err(CliError::Input)?;
        worst = worst.max((ours - theirs).abs());
        if (ours - theirs).abs() > 1e-6 {
            bad.push(format!("{}: t* {ours} vs oracle {theirs}", inst.name));
        }
        for t in [3, 4] {
            let g = inst.wg.base();
            let listed: Vec<Vec<usize>> = cliques::enumerate_cliques(g, t)?.iter().map(<[usize]>::to_vec).collect();
            if listed != oracle::all_cliques(g, t) {
                bad.push(format!("{}: K_{t} enumeration differs from brute force", inst.name));
            }
        }
    }
    let paley = gen::paley(13)?;
    let brute = oracle::all_cliques(&paley, 3).len();
    let ours = cliques::enumerate_cliques(&paley, 3)?.len();
    if brute != 26 || ours != 26 {
        bad.push(format!("Paley(13) triangles: enumeration {ours}, brute force {brute}, expected 26"));
    }
    Ok((
        bad.is_empty(),
        format!(
            "{} graphs on <= 12 vertices, max |t* - minilp| {worst:.2e}, Paley(13) triangles {ours}{}",
            small.len(),
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    ))
}

fn dense_identity() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [6, 12, 30] {
        let g = gen::complete(n)?;
        let bundle = pipeline::dense_extract(&g, 3, 2, None, TOL)?;
        let tuples: Vec<&[usize]> = bundle.cliques.iter().collect();
        let mut w = vec![1.0; g.m()];
        let mut worst_drop = 0.0f64;
        let mut total = vec![0.0; g.m()];
        for f in &bundle.factors {
            let loads = oracle::tuple_pair_loads(&tuples, f);
            let before = oracle::weighted_degrees(&g, &w);
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                let l = loads.get(&(u, v)).copied().unwrap_or(0.0);
                w[e] -= l;
                total[e] += l;
            }
            let after = oracle::weighted_degrees(&g, &w);
            for (b, a) in before.iter().zip(&after) {
                worst_drop = worst_drop.max((b - a - 2.0).abs());
            }
        }
        let max_load = total.iter().copied().fold(0.0, f64::max);
        let this_ok = bundle.ell() == 2 && worst_drop <= 1e-6 && max_load <= 1.0 + 1e-7;
        ok &= this_ok;
        notes.push(format!(
            "K_{n}: {} factors, max |drop-2| {worst_drop:.1e}, max edge load {max_load:.9}",
            bundle.ell()
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn spectral_correctness() -> Verdict {
    let expected = [
        ("K_6", gen::complete(6)?, 1.0),
        ("Petersen", gen::petersen(), 2.0),
        ("Paley(13)", gen::paley(13)?, (1.0 + 13f64.sqrt()) / 2.0),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (i, (name, g, lambda)) in expected.iter().enumerate() {
        let cert = spectral::second_eigenvalue(g, 1e-10)?;
        let audit = spectral::mixing_audit(g, &cert, 10_000, 100 + i as u64);
        let err = (cert.lambda - lambda).abs();
        ok &= err <= 1e-8 && !audit.violated;
        notes.push(format!(
            "{name}: |lambda-{lambda:.6}| {err:.1e}, mixing violations {}",
            if audit.violated { "yes" } else { "none" }
        ));
    }
    let mut applicable = 0;
    let mut floor_failures = Vec::new();
    for (name, g) in corpus::spectral_corpus()? {
        let cert = spectral::second_eigenvalue(&g, 1e-10)?;
        match spectral::lambda_floor_check(&cert) {
            FloorCheck::Pass => applicable += 1,
            FloorCheck::Fail => {
                applicable += 1;
                floor_failures.push(name);
            }
            FloorCheck::NotApplicable => {}
        }
    }
    ok &= floor_failures.is_empty();
    notes.push(format!(
        "lambda floor on {applicable} graphs with d <= n/2: {}",
        if floor_failures.is_empty() {
            "all pass".to_string()
        } else {
            format!("fails on {}", floor_failures.join(", "))
        }
    ));
    Ok((ok, notes.join("; ")))
}

fn clique_windows() -> Verdict {
    let g = gen::random_regular(100, 50, 1)?;
    let empty = Graph::empty(100);
    let mut subsets: Vec<Vec<usize>> = vec![(0..100).collect()];
    let mut r = rng::seeded(5);
    for _ in 0..20 {
        let k = r.gen_range(25..=100);
        let mut u = index::sample(&mut r, 100, k).into_vec();
        u.sort_unstable();
        subsets.push(u);
    }
    let mut checks = 0;
    let mut outside = Vec::new();
    for u in &subsets {
        for i in [2, 3] {
            let w = cliques::count_cliques_window(&g, &empty, u, i)?;
            checks += 1;
            if !w.within {
                outside.push(format!("|U|={} i={i}: {} not in [{}, {}]", u.len(), w.count, w.lower, w.upper));
            }
        }
    }
    Ok((
        outside.is_empty(),
        format!(
            "random_regular(100,50,seed=1), {} subsets x i in {{2,3}}: {}/{checks} within{}",
            subsets.len(),
            checks - outside.len(),
            if outside.is_empty() { String::new() } else { format!("; {}", outside.join("; ")) }
        ),
    ))
}

fn coverage_runs(name: &str, g: &Graph, mode: ModeChoice, ell: Option<usize>) -> Result<Vec<CoverageRow>, CliError> {
    let runs: Vec<Result<CoverageRow, CliError>> = (1..=5u64)
        .into_par_iter()
        .map(|seed| {
            let mut cfg = PipelineConfig::new(3, seed);
            cfg.mode = mode;
            cfg.ell = ell;
            let start = Instant::now();
            let r = pipeline::run_end_to_end(g, &cfg)?;
            Ok(CoverageRow {
                instance: name.to_string(),
                seed,
                ell_achieved: r.audits.extraction.achieved,
                uncovered_count: r.result.uncovered_count,
                runtime_ms: start.elapsed().as_millis() as u64,
            })
        })
        .collect();
    runs.into_iter().collect()
}

fn pipeline_coverage(coverage: &mut Vec<CoverageRow>) -> Verdict {
    let start = Instant::now();
    let k60 = coverage_runs("K_60 dense ell=2", &gen::complete(60)?, ModeChoice::Dense, Some(2))?;
    let rr = coverage_runs(
        "random_regular(90,45,seed=1) auto",
        &gen::random_regular(90, 45, 1)?,
        ModeChoice::Auto,
        None,
    )?;
    let k60_good = k60.iter().filter(|r| r.uncovered_count == 0).count();
    let rr_good = rr.iter().filter(|r| r.uncovered_count as f64 / 90.0 <= 0.10).count();
    let secs = start.elapsed().as_secs_f64();
    let show = |rows: &[CoverageRow]| rows.iter().map(|r| r.uncovered_count.to_string()).collect::<Vec<_>>().join(",");
    let detail = format!(
        "K_60 uncovered [{}] ({k60_good}/5 zero); random_regular(90,45) uncovered [{}] ({rr_good}/5 <= 10%); {secs:.1} s (limit 300 s)",
        show(&k60),
        show(&rr)
    );
    coverage.extend(k60);
    coverage.extend(rr);
    Ok((k60_good >= 4 && rr_good >= 4 && secs < 300.0, detail))
}

fn sparse_split() -> Verdict {
    let g = gen::random_regular(100, 50, 1)?;
    let ell = 3;
    let results: Vec<Result<Vec<String>, CliError>> = (1..=20u64)
        .into_par_iter()
        .map(|seed| {
            let mut issues = Vec::new();
            let (parts, _) = pipeline::split_with_report(&g, ell, seed)?;
            let mut owner = vec![0usize; g.m()];
            for part in &parts {
                for &(u, v) in part.edges() {
                    match g.edge_id(u, v) {
                        Some(e) => owner[e] += 1,
                        None => issues.push(format!("seed {seed}: part edge {u}-{v} not in G")),
                    }
                }
            }
            if owner.iter().any(|&c| c != 1) {
                issues.push(format!("seed {seed}: parts do not partition E"));
            }
            let p = 1.0 / ell as f64;
            let mean = g.m() as f64 * p;
            let sigma = (g.m() as f64 * p * (1.0 - p)).sqrt();
            for part in &parts {
                let dev = (part.m() as f64 - mean).abs() / sigma;
                if dev > 5.0 {
                    issues.push(format!("seed {seed}: part with {} edges is {dev:.1} sigma out", part.m()));
                }
            }
            let bundle = pipeline::sparse_extract(&g, 3, ell, seed, TOL)?;
            let shared = (0..bundle.cliques.len())
                .filter(|&id| bundle.factors.iter().filter(|f| f[id] > 0.0).count() > 1)
                .count();
            if shared > 0 {
                issues.push(format!("seed {seed}: {shared} cliques weighted in more than one factor"));
            }
            Ok(issues)
        })
        .collect();
    let mut issues = Vec::new();
    for r in results {
        issues.extend(r?);
    }
    Ok((
        issues.is_empty(),
        if issues.is_empty() {
            format!("random_regular(100,50,seed=1), ell={ell}, 20 seeds: partition exact, parts within 5 sigma, one factor per clique")
        } else {
            issues.join("; ")
        },
    ))
}

fn hf_statistics() -> Verdict {
    let g = gen::complete(12)?;
    let ell = 2;
    let bundle = pipeline::dense_extract(&g, 3, ell, None, TOL)?;
    if bundle.ell() != ell {
        return Ok((false, format!("dense bundle has {} factors, wanted {ell}", bundle.ell())));
    }
    let bound = 1.0 + 3.0 * 12f64.ln();
    let samples = 200;
    let mut sum = [0usize; 12];
    let mut worst_codegree = 0;
    for seed in 0..samples {
        let hf = pipeline::build_hf(&bundle, TOL, seed)?;
        let (deg, co) = oracle::degree_codegree(12, &hf.hyperedges);
        for (s, d) in sum.iter_mut().zip(deg) {
            *s += d;
        }
        worst_codegree = worst_codegree.max(co);
    }
    let means: Vec<f64> = sum.iter().map(|&s| s as f64 / samples as f64).collect();
    let (lo, hi) = means
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &m| (a.min(m), b.max(m)));
    let ok = lo >= ell as f64 - 0.5 && hi <= ell as f64 + 0.5 && worst_codegree as f64 <= bound;
    Ok((
        ok,
        format!(
            "K_12, ell=2, {samples} samples: mean degree per vertex in [{lo:.3}, {hi:.3}], max codegree {worst_codegree} (bound {bound:.3})"
        ),
    ))
}

fn determinism(cfl: Option<&Path>) -> Verdict {
    let g = gen::random_regular(40, 12, 3)?;
    let mut cfg = PipelineConfig::new(3, 11);
    cfg.mode = ModeChoice::Dense;
    cfg.ell = Some(2);
    cfg.matcher = MatchMode::Nibble;
    let a = to_canonical_json(&pipeline::run_end_to_end(&g, &cfg)?)?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let b = single.install(|| -> Result<String, CliError> { Ok(to_canonical_json(&pipeline::run_end_to_end(&g, &cfg)?)?) })?;
    let mut ok = a == b;
    let mut detail = format!(
        "in-process reports ({} bytes) {} across thread counts",
        a.len(),
        if a == b { "identical" } else { "DIFFER" }
    );
    if let Some(exe) = cfl {
        let (same, len) = binary_runs_match(exe, &g)?;
        ok &= same;
        let _ = write!(
            detail,
            "; two `pipeline` runs of the binary ({len} bytes) {}",
            if same { "byte-identical" } else { "DIFFER" }
        );
    }
    Ok((ok, detail))
}

fn binary_runs_match(exe: &Path, g: &Graph) -> Result<(bool, usize), CliError> {
    let dir = tempfile::tempdir().map_err(|e| CliError::Input(e.to_string()))?;
    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, io::write_graph(g)).map_err(|source| CliError::Io {
        path: graph.clone(),
        source,
    })?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("report{run}.json"));
        let status = Command::new(exe)
            .args(["pipeline", "--t", "3", "--seed", "11", "--mode", "dense", "--ell", "2", "--force", "--in"])
            .arg(&graph)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| CliError::Input(format!("cannot run {}: {e}", exe.display())))?;
        if status.code().is_none_or(|c| c > 1) {
            return Err(CliError::Input(format!("pipeline run exited with {status}")));
        }
        outputs.push(std::fs::read(&out).map_err(|source| CliError::Io { path: out, source })?);
    }
    Ok((outputs[0] == outputs[1], outputs[0].len()))
}
