//! Subcommand definitions and handlers.
//!
//! Every handler returns an [`Outcome`]: the bytes to emit and whether an
//! audit failed. Errors map to exit codes through [`CliError::exit_code`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use cfl_core::cliques::{self, PropertyPReport, SpanAuditReport, WindowCount};
use cfl_core::lp::{self, LpForm, Prop3Report, SlacknessReport};
use cfl_core::pipeline::{self, MatchMode, ModeChoice, PipelineConfig, PipelineReport};
use cfl_core::spectral::{self, Branch, EigenMethod, FloorCheck, HypothesisReport, MixingAuditReport, SpectralCert};
use cfl_core::{gen, io, Graph, WGraph};

use crate::{read_text, suite, to_canonical_json, write_atomic, CliError};

#[derive(Debug, Parser)]
#[command(name = "cfl", version, about = "Clique-factor pipeline for pseudorandom regular graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph in the text format.
    Gen(GenArgs),
    /// Second eigenvalue certificate.
    Spectrum(SpectrumArgs),
    /// Sample the expander mixing inequality.
    AuditMixing(MixingArgs),
    /// Clique counts, counting windows, and clique-family audits.
    Cliques(CliquesArgs),
    /// Solve the fractional clique-matching programme and its dual.
    Lp(LpArgs),
    /// End-to-end run: extraction, H_f, matching.
    Pipeline(PipelineArgs),
    /// Run the acceptance criteria and print a pass/fail table.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Complete,
    Paley,
    Circulant,
    RandomRegular,
    Petersen,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// Circulant connection set, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub offsets: Vec<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Dense,
    Power,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Also evaluate the hypothesis thresholds for this clique order.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CliquesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    /// Include the clique tuples in the output.
    #[arg(long)]
    pub list: bool,
    /// Clique orders `i` for the counting window, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub window: Vec<usize>,
    /// Vertex subset `U` for the window, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    pub subset: Vec<usize>,
    /// Graph file whose edges are removed before counting in the window.
    #[arg(long)]
    pub minus: Option<PathBuf>,
    /// Audit property P with parameters `D,D'`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub property_p: Vec<usize>,
    /// Audit that random vertex sets of this size span a clique.
    #[arg(long)]
    pub span_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    /// Weighted (`u v w`) or unweighted (`u v`) graph file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value_t = lp::DEFAULT_TOL)]
    pub tol: f64,
    /// Also audit the basic facts about t* (needs --seed for the random subset).
    #[arg(long)]
    pub prop3: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatcherArg {
    Nibble,
    Greedy,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, required_unless_present = "seeds")]
    pub seed: Option<u64>,
    /// Run several seeds (comma separated); the JSON output becomes an array.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    pub seeds: Vec<u64>,
    #[arg(long, value_enum, default_value_t = MatcherArg::Nibble)]
    pub matcher: MatcherArg,
    /// Search-node budget for exact augmentation of the matching; 0 disables it.
    #[arg(long, default_value_t = pipeline::AUGMENT_BUDGET)]
    pub augment_budget: u64,
    #[arg(long, default_value_t = lp::DEFAULT_TOL)]
    pub tol: f64,
    /// Run even when the spectral hypotheses fail.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-seed table: seed, ell achieved, uncovered count, runtime in ms.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Criteria to run, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Per-seed coverage table of the pipeline criterion.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Machine-readable summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a handler produced.
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub audit_failed: bool,
}

impl Outcome {
    fn written(out: &Option<PathBuf>, text: String, audit_failed: bool) -> Result<Outcome, CliError> {
        let stdout = match out {
            Some(path) => {
                write_atomic(path, text.as_bytes())?;
                Vec::new()
            }
            None => text.into_bytes(),
        };
        Ok(Outcome { stdout, audit_failed })
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen(a) => run_gen(&a),
        Command::Spectrum(a) => run_spectrum(&a),
        Command::AuditMixing(a) => run_mixing(&a),
        Command::Cliques(a) => run_cliques(&a),
        Command::Lp(a) => run_lp(&a),
        Command::Pipeline(a) => run_pipeline(&a),
        Command::Suite(a) => run_suite(&a),
    }
}

fn need<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required for {kind}")))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    Ok(io::parse_graph(&read_text(path)?)?)
}

pub fn run_gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let g = match a.kind {
        GenKind::Complete => gen::complete(need(a.n, "n", "complete")?)?,
        GenKind::Paley => gen::paley(need(a.q, "q", "paley")?)?,
        GenKind::Circulant => {
            if a.offsets.is_empty() {
                return Err(CliError::Input("--offsets is required for circulant".into()));
            }
            gen::circulant(need(a.n, "n", "circulant")?, &a.offsets)?
        }
        GenKind::RandomRegular => gen::random_regular(
            need(a.n, "n", "random-regular")?,
            need(a.d, "d", "random-regular")?,
            need(a.seed, "seed", "random-regular")?,
        )?,
        GenKind::Petersen => gen::petersen(),
    };
    Outcome::written(&a.out, io::write_graph(&g), false)
}

#[derive(Serialize)]
struct SpectrumOutput {
    #[serde(flatten)]
    cert: SpectralCert,
    lambda_floor: FloorCheck,
    hypothesis: Option<HypothesisReport>,
}

pub fn run_spectrum(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let g = read_graph(&a.input)?;
    let cert = match a.method {
        MethodArg::Auto => spectral::second_eigenvalue(&g, a.tol)?,
        MethodArg::Dense => spectral::second_eigenvalue_with(&g, a.tol, EigenMethod::DenseEig)?,
        MethodArg::Power => spectral::second_eigenvalue_with(&g, a.tol, EigenMethod::PowerIter)?,
    };
    let hypothesis = a.t.map(|t| spectral::hypothesis_check(&cert, t)).transpose()?;
    let lambda_floor = spectral::lambda_floor_check(&cert);
    let failed = lambda_floor == FloorCheck::Fail;
    let out = SpectrumOutput {
        cert,
        lambda_floor,
        hypothesis,
    };
    Outcome::written(&a.out, to_canonical_json(&out)?, failed)
}

#[derive(Serialize)]
struct MixingOutput {
    lambda: f64,
    d: usize,
    n: usize,
    seed: u64,
    #[serde(flatten)]
    audit: MixingAuditReport,
}

pub fn run_mixing(a: &MixingArgs) -> Result<Outcome, CliError> {
    let g = read_graph(&a.input)?;
    let cert = spectral::second_eigenvalue(&g, a.tol)?;
    let audit = spectral::mixing_audit(&g, &cert, a.samples, a.seed);
    let failed = audit.violated;
    let out = MixingOutput {
        lambda: cert.lambda,
        d: cert.d,
        n: cert.n,
        seed: a.seed,
        audit,
    };
    Outcome::written(&a.out, to_canonical_json(&out)?, failed)
}

#[derive(Serialize)]
struct CliquesOutput {
    n: usize,
    t: usize,
    count: usize,
    cliques: Option<Vec<Vec<usize>>>,
    windows: Vec<WindowCount>,
    property_p: Option<PropertyPReport>,
    span: Option<SpanAuditReport>,
}

pub fn run_cliques(a: &CliquesArgs) -> Result<Outcome, CliError> {
    let g = read_graph(&a.input)?;
    let cl = cliques::enumerate_cliques(&g, a.t)?;
    let gprime = match &a.minus {
        Some(p) => read_graph(p)?,
        None => Graph::empty(g.n()),
    };
    let subset: Vec<usize> = if a.subset.is_empty() {
        (0..g.n()).collect()
    } else {
        a.subset.clone()
    };
    let windows = a
        .window
        .iter()
        .map(|&i| cliques::count_cliques_window(&g, &gprime, &subset, i))
        .collect::<Result<Vec<_>, _>>()?;
    let property_p = if a.property_p.is_empty() {
        None
    } else {
        let seed = need(a.seed, "seed", "--property-p")?;
        Some(cliques::property_p_audit(&g, a.t, a.property_p[0], a.property_p[1], a.trials, seed)?)
    };
    let span = match a.span_size {
        Some(size) => {
            let seed = need(a.seed, "seed", "--span-size")?;
            Some(cliques::span_clique_audit(&g, a.t, size, a.trials, seed)?)
        }
        None => None,
    };
    let failed = windows.iter().any(|w| !w.within)
        || property_p.as_ref().is_some_and(|p| p.failures > 0)
        || span.as_ref().is_some_and(|s| s.failures > 0);
    let out = CliquesOutput {
        n: g.n(),
        t: a.t,
        count: cl.len(),
        cliques: a.list.then(|| cl.iter().map(<[usize]>::to_vec).collect()),
        windows,
        property_p,
        span,
    };
    Outcome::written(&a.out, to_canonical_json(&out)?, failed)
}

fn tuple_key(tuple: &[usize]) -> String {
    tuple.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Clique tuple → weight, dropping entries at or below `tol`.
fn weight_map(cl: &cliques::CliqueSet, f: &[f64], tol: f64) -> BTreeMap<String, f64> {
    f.iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > tol)
        .map(|(id, &x)| (tuple_key(cl.clique(id)), x))
        .collect()
}

#[derive(Serialize)]
struct PrimalOut {
    objective: f64,
    f: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct DualOut {
    objective: f64,
    g: Vec<f64>,
    /// Edge `u,v` → `h(uv)`, zeros omitted.
    h: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct FactorOut {
    has_factor: bool,
    t_star: f64,
    slack: f64,
    per_vertex_load: Vec<f64>,
    f: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct LpOutput {
    n: usize,
    m: usize,
    t: usize,
    cliques: usize,
    tol: f64,
    form: LpForm,
    iterations: usize,
    t_star: f64,
    primal: PrimalOut,
    dual: DualOut,
    slackness: SlacknessReport,
    factor: FactorOut,
    prop3: Option<Prop3Report>,
}

pub fn run_lp(a: &LpArgs) -> Result<Outcome, CliError> {
    let wg: WGraph = io::parse_any(&read_text(&a.input)?)?;
    let g = wg.base();
    let cl = cliques::enumerate_cliques(g, a.t)?;
    let pair = lp::solve_pair(&wg, &cl, &a.tol)?;
    let slackness = lp::complementary_slackness(&wg, &cl, &pair.primal, &pair.dual, &a.tol)?;
    let factor = lp::fractional_factor_in(&wg, &cl, &a.tol)?;
    let prop3 = if a.prop3 {
        Some(lp::check_prop3(&wg, a.t, a.tol, need(a.seed, "seed", "--prop3")?)?)
    } else {
        None
    };
    let failed = !slackness.ok || prop3.as_ref().is_some_and(|p| !p.all_pass);
    let h = g
        .edges()
        .iter()
        .zip(&pair.dual.h)
        .filter(|(_, x)| x.abs() > a.tol)
        .map(|(&(u, v), &x)| (format!("{u},{v}"), x))
        .collect();
    let out = LpOutput {
        n: g.n(),
        m: g.m(),
        t: a.t,
        cliques: cl.len(),
        tol: a.tol,
        form: pair.form,
        iterations: pair.iterations,
        t_star: pair.primal.objective,
        primal: PrimalOut {
            objective: pair.primal.objective,
            f: weight_map(&cl, &pair.primal.f, a.tol),
        },
        dual: DualOut {
            objective: pair.dual.objective,
            g: pair.dual.g.clone(),
            h,
        },
        slackness,
        factor: FactorOut {
            has_factor: factor.has_factor,
            t_star: factor.t_star,
            slack: factor.slack,
            per_vertex_load: factor.per_vertex_load.clone(),
            f: weight_map(&cl, &factor.f, a.tol),
        },
        prop3,
    };
    Outcome::written(&a.out, to_canonical_json(&out)?, failed)
}

impl PipelineArgs {
    pub fn config(&self, seed: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(self.t, seed);
        cfg.mode = match self.mode {
            ModeArg::Auto => ModeChoice::Auto,
            ModeArg::Dense => ModeChoice::Dense,
            ModeArg::Sparse => ModeChoice::Sparse,
        };
        cfg.ell = self.ell;
        cfg.alpha = self.alpha;
        cfg.epsilon = self.epsilon;
        cfg.tol = self.tol;
        cfg.matcher = match self.matcher {
            MatcherArg::Nibble => MatchMode::Nibble,
            MatcherArg::Greedy => MatchMode::Greedy,
        };
        cfg.augment_budget = self.augment_budget;
        cfg
    }
}

/// A run counts as an audit failure when fewer factors than requested were
/// extracted, the leftover bound is missed, or the random split is lopsided.
pub fn pipeline_audit_failed(r: &PipelineReport) -> bool {
    r.audits.extraction.shortfall || !r.leftover_bound.met || r.audits.split.as_ref().is_some_and(|s| s.warning)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRow {
    pub seed: u64,
    pub ell_achieved: usize,
    pub uncovered_count: usize,
    pub runtime_ms: u64,
}

pub fn seed_csv(rows: &[SeedRow]) -> String {
    let mut out = String::from("seed,ell_achieved,uncovered_count,runtime_ms\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.seed, r.ell_achieved, r.uncovered_count, r.runtime_ms);
    }
    out
}

#[derive(Serialize)]
struct Refusal {
    refused: bool,
    reason: &'static str,
    hypothesis: HypothesisReport,
}

pub fn run_pipeline(a: &PipelineArgs) -> Result<Outcome, CliError> {
    if a.t < 3 {
        return Err(CliError::Input("--t must be at least 3".into()));
    }
    let g = read_graph(&a.input)?;
    if !a.force {
        let cert = spectral::second_eigenvalue(&g, 1e-6)?;
        let hypothesis = spectral::hypothesis_check(&cert, a.t)?;
        if hypothesis.verdict == Branch::Fails {
            eprintln!("spectral hypotheses fail for this graph; rerun with --force to run anyway");
            let refusal = Refusal {
                refused: true,
                reason: "hypotheses_fail",
                hypothesis,
            };
            return Outcome::written(&a.out, to_canonical_json(&refusal)?, true);
        }
    }
    let seeds: Vec<u64> = match a.seed {
        Some(s) => vec![s],
        None => a.seeds.clone(),
    };
    let runs: Vec<Result<(PipelineReport, u64), cfl_core::Error>> = seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            pipeline::run_end_to_end(&g, &a.config(seed)).map(|r| (r, start.elapsed().as_millis() as u64))
        })
        .collect();
    let mut reports = Vec::with_capacity(runs.len());
    let mut rows = Vec::with_capacity(runs.len());
    for run in runs {
        let (report, ms) = run?;
        rows.push(SeedRow {
            seed: report.parameters.seed,
            ell_achieved: report.audits.extraction.achieved,
            uncovered_count: report.result.uncovered_count,
            runtime_ms: ms,
        });
        reports.push(report);
    }
    if let Some(path) = &a.csv {
        write_atomic(path, seed_csv(&rows).as_bytes())?;
    }
    let failed = reports.iter().any(pipeline_audit_failed);
    let text = if a.seed.is_some() {
        to_canonical_json(&reports[0])?
    } else {
        to_canonical_json(&reports)?
    };
    Outcome::written(&a.out, text, failed)
}

pub fn run_suite(a: &SuiteArgs) -> Result<Outcome, CliError> {
    let ids: Vec<u8> = if a.only.is_empty() {
        suite::ALL.to_vec()
    } else {
        a.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !suite::ALL.contains(id)) {
        return Err(CliError::Input(format!("no acceptance criterion {bad}")));
    }
    let exe = std::env::current_exe().ok();
    let report = suite::run(&ids, exe.as_deref());
    if let Some(path) = &a.csv {
        write_atomic(path, suite::coverage_csv(&report.coverage).as_bytes())?;
    }
    if let Some(path) = &a.out {
        write_atomic(path, to_canonical_json(&report)?.as_bytes())?;
    }
    let failed = report.criteria.iter().any(|c| !c.passed);
    Ok(Outcome {
        stdout: suite::table(&report).into_bytes(),
        audit_failed: failed,
    })
}
