//! The experiment commands. Each one follows the same shape: merge flags
//! with an optional `--config` file (flags win), validate into a concrete
//! config, run, and emit a JSON report (stdout, optionally `PREFIX.json`)
//! with a CSV mirror of the tabular part (`PREFIX.csv`).

use clap::Args;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use locality_lab::algo::{make_lca, make_local, verify_solution, ProblemId, VerifyReport};
use locality_lab::graph::{generate, read_graph, write_graph, GraphSpec, LabeledGraph};
use locality_lab::lowerbounds::{
    build_pair, gap_report, registered_trees, transcript_distribution, DistributionMode, GapReport,
    PerturbationSpace, GAP_VERTEX_LIMIT,
};
use locality_lab::models::{run_lca, run_local, run_partree, Label, LcaContext, SeedBits};
use locality_lab::perm::{
    declared_seed_bits, explicit_quality_sampled, kwise_quality_exhaustive,
    lazy_quality_exhaustive, ExplicitPerm, FamilyQuality, KwisePerm, PermError, PermHandle,
};
use locality_lab::report::{
    config_hash, witness_hash, write_csv, write_json, CsvTable, Report, SeedAccounting,
};
use locality_lab::seeding::{derive_seed, stream_rng};
use locality_lab::sim::{
    derandomize_search, enumerate_bounded_graphs, estimate_failure, run_localized_lca,
    DerandomizationReport, FailureBound, FailureEstimate, HSpec, LocalizeRun, LocalizerConfig,
    DEFAULT_LOCALITY_GUARD, SEED_OVERHEAD_CONSTANT,
};

use crate::spec::parse_graph_spec;
use crate::CliError;

// ---------------------------------------------------------------------------
// Shared plumbing

/// Implements the flag-over-file config merge for an argument struct.
macro_rules! resolvable {
    ($ty:ty; $($field:ident),+ $(,)?) => {
        impl $ty {
            fn resolve(mut self) -> Result<Self, CliError> {
                let Some(path) = self.config.take() else {
                    return Ok(self);
                };
                let body = fs::read_to_string(&path).map_err(|e| {
                    CliError::Schema(format!("config {}: {e}", path.display()))
                })?;
                let file: Self = serde_json::from_str(&body).map_err(|e| {
                    CliError::Schema(format!("config {}: {e}", path.display()))
                })?;
                Ok(Self {
                    config: None,
                    $($field: self.$field.or(file.$field)),+
                })
            }
        }
    };
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Schema(format!("missing --{flag}")))
}

fn schema<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Schema(e.to_string())
}

fn guard<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Guard(e.to_string())
}

/// Materialises a graph from exactly one of a spec string or a file in the
/// text format, returning it with a description for the report.
fn load_graph(spec: Option<&str>, file: Option<&Path>) -> Result<(LabeledGraph, String), CliError> {
    match (spec, file) {
        (Some(s), None) => {
            let parsed = parse_graph_spec(s).map_err(CliError::Schema)?;
            Ok((generate(&parsed).map_err(schema)?, s.to_string()))
        }
        (None, Some(p)) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Schema(format!("graph file {}: {e}", p.display())))?;
            Ok((
                read_graph(&text).map_err(schema)?,
                format!("file:{}", p.display()),
            ))
        }
        _ => Err(CliError::Schema(
            "give exactly one of --graph or --graph-file".into(),
        )),
    }
}

fn parse_h(name: &str) -> Result<HSpec, CliError> {
    match name {
        "empty" => Ok(HSpec::Empty),
        "cycle" => Ok(HSpec::Cycle),
        other => Err(CliError::Schema(format!(
            "unknown virtual graph `{other}` (expected `empty` or `cycle`)"
        ))),
    }
}

/// The verification problem an algorithm spec solves, if any.
fn problem_for(alg_spec: &str) -> Option<ProblemId> {
    match alg_spec {
        "cycle-coloring3" => Some(ProblemId::CycleColoring3),
        "mis-cycle" => Some(ProblemId::MaximalIndependentSet),
        "matching-cycle" => Some(ProblemId::MaximalMatching),
        _ => None,
    }
}

fn emit<C: Serialize, T: Serialize>(
    command: &str,
    config: &C,
    master_seed: u64,
    seed_accounting: Option<SeedAccounting>,
    payload: T,
    csv: &CsvTable,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let report = Report {
        command: command.into(),
        config_hash: config_hash(config).map_err(guard)?,
        master_seed,
        seed_accounting,
        payload,
    };
    let mut body = serde_json::to_string_pretty(&report).map_err(guard)?;
    body.push('\n');
    print!("{body}");
    if let Some(prefix) = out {
        let json_path = PathBuf::from(format!("{}.json", prefix.display()));
        write_json(&json_path, &report)
            .map_err(|e| CliError::Guard(format!("writing {}: {e}", json_path.display())))?;
        let csv_path = PathBuf::from(format!("{}.csv", prefix.display()));
        write_csv(&csv_path, csv)
            .map_err(|e| CliError::Guard(format!("writing {}: {e}", csv_path.display())))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen-graph

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenGraphArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph spec, e.g. `cycle:9` or `pad:12:two-path:10:7`.
    #[arg(long)]
    pub graph: Option<String>,
    /// Also write the graph in the line-oriented text format.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
    /// Report path prefix (writes PREFIX.json and PREFIX.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(GenGraphArgs; graph, graph_out, out);

#[derive(Serialize)]
struct GenGraphConfig {
    graph: String,
    graph_out: Option<String>,
}

#[derive(Serialize)]
struct GenGraphPayload {
    graph: String,
    n: usize,
    delta: usize,
    edges: usize,
    connected: bool,
    girth: Option<usize>,
    components: usize,
}

pub fn gen_graph(args: GenGraphArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let spec_text = require(args.graph, "graph")?;
    let parsed = parse_graph_spec(&spec_text).map_err(CliError::Schema)?;
    let g = generate(&parsed).map_err(schema)?;
    if let Some(path) = &args.graph_out {
        fs::write(path, write_graph(&g))
            .map_err(|e| CliError::Guard(format!("writing {}: {e}", path.display())))?;
    }
    let components = g.component_ids().iter().collect::<BTreeSet<_>>().len();
    let payload = GenGraphPayload {
        graph: spec_text.clone(),
        n: g.n(),
        delta: g.delta(),
        edges: g.edge_count(),
        connected: g.is_connected(),
        girth: g.girth(),
        components,
    };
    let mut csv = CsvTable::new(["u", "v"]);
    for (u, v) in g.edges() {
        csv.push([u.to_string(), v.to_string()]);
    }
    let config = GenGraphConfig {
        graph: spec_text,
        graph_out: args.graph_out.map(|p| p.display().to_string()),
    };
    emit(
        "gen-graph",
        &config,
        0,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// run-local

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunLocalArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph spec (see gen-graph).
    #[arg(long)]
    pub graph: Option<String>,
    /// Graph file in the text format, instead of --graph.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// Message-passing algorithm: cycle-coloring3 | mis-cycle | matching-cycle.
    #[arg(long)]
    pub alg: Option<String>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(RunLocalArgs; graph, graph_file, alg, out);

#[derive(Serialize)]
struct RunConfig {
    graph: String,
    alg: String,
    budget: Option<usize>,
}

#[derive(Serialize)]
struct RunLocalPayload {
    graph: String,
    alg: String,
    radius: usize,
    labels: Vec<Label>,
    verification: Option<VerifyReport>,
}

pub fn run_local_cmd(args: RunLocalArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let (g, graph_desc) = load_graph(args.graph.as_deref(), args.graph_file.as_deref())?;
    let alg_spec = require(args.alg, "alg")?;
    let alg = make_local(&alg_spec).map_err(CliError::Schema)?;
    let run = run_local(alg.as_ref(), &g).map_err(guard)?;
    let verification = match problem_for(&alg_spec) {
        Some(problem) => Some(verify_solution(problem, &g, &run.labels).map_err(guard)?),
        None => None,
    };
    let mut csv = CsvTable::new(["vertex", "answer"]);
    for (v, label) in run.labels.iter().enumerate() {
        csv.push([v.to_string(), label.to_string()]);
    }
    let config = RunConfig {
        graph: graph_desc.clone(),
        alg: alg_spec.clone(),
        budget: None,
    };
    let payload = RunLocalPayload {
        graph: graph_desc,
        alg: alg_spec,
        radius: run.radius,
        labels: run.labels,
        verification,
    };
    emit(
        "run-local",
        &config,
        0,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// run-partree

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunPartreeArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph spec (see gen-graph).
    #[arg(long)]
    pub graph: Option<String>,
    /// Graph file in the text format, instead of --graph.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// Probe routine spec, e.g. `cycle-coloring3` or `walk-min:3`.
    #[arg(long)]
    pub alg: Option<String>,
    /// Per-tree probe cap; defaults to the routine's declared bound.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(RunPartreeArgs; graph, graph_file, alg, budget, out);

#[derive(Serialize)]
struct RunPartreePayload {
    graph: String,
    alg: String,
    budget: usize,
    labels: Vec<Label>,
    probes: Vec<usize>,
    total_probes: usize,
    verification: Option<VerifyReport>,
}

pub fn run_partree_cmd(args: RunPartreeArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let (g, graph_desc) = load_graph(args.graph.as_deref(), args.graph_file.as_deref())?;
    let alg_spec = require(args.alg, "alg")?;
    let alg = make_lca(&alg_spec).map_err(CliError::Schema)?;
    let run = run_partree(alg.as_ref(), &g, args.budget).map_err(guard)?;
    let probes: Vec<usize> = run.transcripts.iter().map(|t| t.total_probes()).collect();
    let verification = match problem_for(&alg_spec) {
        Some(problem) => Some(verify_solution(problem, &g, &run.labels).map_err(guard)?),
        None => None,
    };
    let mut csv = CsvTable::new(["vertex", "answer", "probes"]);
    for (v, (label, p)) in run.labels.iter().zip(&probes).enumerate() {
        csv.push([v.to_string(), label.to_string(), p.to_string()]);
    }
    let config = RunConfig {
        graph: graph_desc.clone(),
        alg: alg_spec.clone(),
        budget: args.budget,
    };
    let payload = RunPartreePayload {
        graph: graph_desc,
        alg: alg_spec,
        budget: run.budget,
        total_probes: probes.iter().sum(),
        labels: run.labels,
        probes,
        verification,
    };
    emit(
        "run-partree",
        &config,
        0,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// run-lca

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunLcaArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph spec (see gen-graph).
    #[arg(long)]
    pub graph: Option<String>,
    /// Graph file in the text format, instead of --graph.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// Probe routine spec, e.g. `two-path-leader-stateful`.
    #[arg(long)]
    pub alg: Option<String>,
    /// Per-query probe cap; defaults to the routine's declared bound.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Master seed for the routine's random tape.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated query stream; defaults to every vertex in id order.
    #[arg(long)]
    pub queries: Option<String>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(RunLcaArgs; graph, graph_file, alg, budget, seed, queries, out);

#[derive(Serialize)]
struct RunLcaConfig {
    graph: String,
    alg: String,
    budget: Option<usize>,
    seed: u64,
    queries: Option<String>,
}

#[derive(Serialize)]
struct RunLcaPayload {
    graph: String,
    alg: String,
    queries: Vec<u64>,
    answers: Vec<Label>,
    probes: Vec<usize>,
    state_bits: usize,
    seed_bits: usize,
}

pub fn run_lca_cmd(args: RunLcaArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let (g, graph_desc) = load_graph(args.graph.as_deref(), args.graph_file.as_deref())?;
    let alg_spec = require(args.alg, "alg")?;
    let alg = make_lca(&alg_spec).map_err(CliError::Schema)?;
    let master = args.seed.unwrap_or(0);
    let n = g.n() as u64;
    let queries: Vec<u64> = match &args.queries {
        Some(text) => text
            .split(',')
            .map(|q| q.trim().parse::<u64>().map_err(schema))
            .collect::<Result<_, _>>()?,
        None => (0..n).collect(),
    };
    let seed_bits = alg.seed_bits(n);
    let seed = SeedBits::random(&mut stream_rng(master, "lca-seed", 0), seed_bits);
    let mut ctx = LcaContext::for_algorithm(alg.as_ref(), n, seed);
    ctx.probe_budget = args.budget;
    let run = run_lca(alg.as_ref(), &g, &queries, &mut ctx).map_err(guard)?;
    let probes: Vec<usize> = run.transcripts.iter().map(|t| t.total_probes()).collect();
    let mut csv = CsvTable::new(["query", "answer", "probes"]);
    for ((q, a), p) in queries.iter().zip(&run.answers).zip(&probes) {
        csv.push([q.to_string(), a.to_string(), p.to_string()]);
    }
    let config = RunLcaConfig {
        graph: graph_desc.clone(),
        alg: alg_spec.clone(),
        budget: args.budget,
        seed: master,
        queries: args.queries,
    };
    let accounting = SeedAccounting {
        family_seed_bits: 0,
        algorithm_seed_bits: seed_bits,
        total_seed_bits: seed_bits,
        seed_bit_budget: None,
    };
    let payload = RunLcaPayload {
        graph: graph_desc,
        alg: alg_spec,
        state_bits: alg.state_bits(n),
        seed_bits,
        queries,
        answers: run.answers,
        probes,
    };
    emit(
        "run-lca",
        &config,
        master,
        Some(accounting),
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// localize

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizeArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph spec (see gen-graph).
    #[arg(long)]
    pub graph: Option<String>,
    /// Graph file in the text format, instead of --graph.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// LCA to localize, e.g. `cycle-coloring3`.
    #[arg(long)]
    pub alg: Option<String>,
    /// Virtual graph on the padding ids: `cycle` (default) or `empty`.
    #[arg(long)]
    pub h: Option<String>,
    /// Independent seeded runs (default 1).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Admission guard constant for `t·Δ ≤ guard·n^(1/4)`.
    #[arg(long)]
    pub locality_guard: Option<u64>,
    /// Constant in the seed budget `s(N) + C·t·Δ·log₂ n`.
    #[arg(long)]
    pub seed_overhead: Option<u64>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(LocalizeArgs; graph, graph_file, alg, h, trials, seed, locality_guard, seed_overhead, out);

#[derive(Serialize)]
struct LocalizeConfig {
    graph: String,
    alg: String,
    h: String,
    trials: u64,
    seed: u64,
    locality_guard: u64,
    seed_overhead: u64,
}

#[derive(Serialize)]
struct LocalizeRunRow {
    run: u64,
    failed: bool,
    certificates_pass: bool,
}

#[derive(Serialize)]
struct LocalizePayload {
    graph: String,
    alg: String,
    h: String,
    trials: u64,
    n: u64,
    big_n: u64,
    delta: u64,
    budget: usize,
    k: u64,
    epsilon_log2: u32,
    bound: FailureBound,
    bound_value: f64,
    failed_runs: u64,
    failure_rate: f64,
    certificates_all_pass: bool,
    verification: Option<VerifyReport>,
    runs: Vec<LocalizeRunRow>,
}

pub fn localize(args: LocalizeArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let (g, graph_desc) = load_graph(args.graph.as_deref(), args.graph_file.as_deref())?;
    let alg_spec = require(args.alg, "alg")?;
    let alg = make_lca(&alg_spec).map_err(CliError::Schema)?;
    let h_name = args.h.unwrap_or_else(|| "cycle".into());
    let h = parse_h(&h_name)?;
    let trials = args.trials.unwrap_or(1).max(1);
    let master = args.seed.unwrap_or(0);
    let localizer = LocalizerConfig {
        locality_guard: args.locality_guard.unwrap_or(DEFAULT_LOCALITY_GUARD),
        seed_overhead: args.seed_overhead.unwrap_or(SEED_OVERHEAD_CONSTANT),
    };

    let mut runs: Vec<LocalizeRun> = Vec::with_capacity(trials as usize);
    for i in 0..trials {
        let run = run_localized_lca(
            alg.as_ref(),
            &g,
            &h,
            derive_seed(master, "localize-run", i),
            &localizer,
        )
        .map_err(guard)?;
        runs.push(run);
    }
    let first = &runs[0];
    let failed_runs = runs.iter().filter(|r| r.failed).count() as u64;
    let certificates_all_pass = runs.iter().all(LocalizeRun::all_certificates_pass);

    // Verify the first clean run's solution against the real graph; matching
    // answers name relabelled partners and must be decoded first.
    let mut verification = None;
    if let Some(run) = runs.iter().find(|r| !r.failed) {
        if let Some(problem) = problem_for(&alg_spec) {
            let labels = if problem == ProblemId::MaximalMatching {
                run.graph_space_partners()
            } else {
                run.labels.clone()
            };
            let labels = labels.expect("clean runs carry labels");
            verification = Some(verify_solution(problem, &g, &labels).map_err(guard)?);
        }
    }

    let mut csv = CsvTable::new(["run", "failed", "certificates_pass"]);
    let mut rows = Vec::with_capacity(runs.len());
    for (i, run) in runs.iter().enumerate() {
        let row = LocalizeRunRow {
            run: i as u64,
            failed: run.failed,
            certificates_pass: run.all_certificates_pass(),
        };
        csv.push([
            row.run.to_string(),
            row.failed.to_string(),
            row.certificates_pass.to_string(),
        ]);
        rows.push(row);
    }

    let config = LocalizeConfig {
        graph: graph_desc.clone(),
        alg: alg_spec.clone(),
        h: h_name.clone(),
        trials,
        seed: master,
        locality_guard: localizer.locality_guard,
        seed_overhead: localizer.seed_overhead,
    };
    let accounting = SeedAccounting {
        family_seed_bits: first.family_seed_bits,
        algorithm_seed_bits: first.algorithm_seed_bits,
        total_seed_bits: first.total_seed_bits,
        seed_bit_budget: Some(first.seed_bit_budget),
    };
    let payload = LocalizePayload {
        graph: graph_desc,
        alg: alg_spec,
        h: h_name,
        trials,
        n: first.n,
        big_n: first.big_n,
        delta: first.delta,
        budget: first.budget,
        k: first.k,
        epsilon_log2: first.epsilon_log2,
        bound: first.bound,
        bound_value: first.bound.value(),
        failed_runs,
        failure_rate: failed_runs as f64 / trials as f64,
        certificates_all_pass,
        verification,
        runs: rows,
    };
    emit(
        "localize",
        &config,
        master,
        Some(accounting),
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// estimate-failure

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateFailureArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph spec (see gen-graph).
    #[arg(long)]
    pub graph: Option<String>,
    /// Graph file in the text format, instead of --graph.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// Virtual id-space size N.
    #[arg(long)]
    pub big_n: Option<u64>,
    /// Virtual graph on the padding ids: `cycle` (default) or `empty`.
    #[arg(long)]
    pub h: Option<String>,
    /// Probe routine under simulation, e.g. `remote:5000`.
    #[arg(long)]
    pub alg: Option<String>,
    /// Probe budget t; defaults to the routine's declared bound at N.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Permutation family: `explicit` (default) or `kwise`.
    #[arg(long)]
    pub family: Option<String>,
    /// Independence parameter for the kwise family; defaults to 1+(Δ+1)t.
    #[arg(long)]
    pub k: Option<usize>,
    /// Kwise closeness exponent (ε = 2^-e, default 24).
    #[arg(long)]
    pub epsilon_log2: Option<u32>,
    /// Relabelled worlds to draw (default 100).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(EstimateFailureArgs; graph, graph_file, big_n, h, alg, budget, family, k, epsilon_log2, trials, seed, out);

#[derive(Serialize)]
struct EstimateConfig {
    graph: String,
    big_n: u64,
    h: String,
    alg: String,
    budget: usize,
    family: String,
    k: usize,
    epsilon_log2: Option<u32>,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct EstimatePayload {
    graph: String,
    big_n: u64,
    h: String,
    alg: String,
    budget: usize,
    family: String,
    k: usize,
    epsilon_log2: Option<u32>,
    estimate: FailureEstimate,
}

pub fn estimate_failure_cmd(args: EstimateFailureArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let (g, graph_desc) = load_graph(args.graph.as_deref(), args.graph_file.as_deref())?;
    let big_n = require(args.big_n, "big-n")?;
    let alg_spec = require(args.alg, "alg")?;
    let alg = make_lca(&alg_spec).map_err(CliError::Schema)?;
    let h_name = args.h.unwrap_or_else(|| "cycle".into());
    let h = parse_h(&h_name)?;
    let budget = args.budget.unwrap_or_else(|| alg.probe_bound(big_n));
    let family_name = args.family.unwrap_or_else(|| "explicit".into());
    let trials = args.trials.unwrap_or(100).max(1);
    let master = args.seed.unwrap_or(0);
    let delta = (g.delta() as u64).max(h.degree_bound());
    let k = args.k.unwrap_or(1 + (delta as usize + 1) * budget);

    let mut epsilon_log2 = None;
    let family: Box<dyn Fn(u64) -> Result<PermHandle, PermError> + Sync> =
        match family_name.as_str() {
            "explicit" => Box::new(move |s| ExplicitPerm::new(big_n, s).map(PermHandle::Explicit)),
            "kwise" => {
                let e = args.epsilon_log2.unwrap_or(24);
                epsilon_log2 = Some(e);
                let bits = declared_seed_bits(big_n, k, e);
                Box::new(move |s| {
                    let seed = SeedBits::random(&mut stream_rng(s, "kwise-member", 0), bits);
                    KwisePerm::new(big_n, k, e, seed).map(PermHandle::Kwise)
                })
            }
            other => {
                return Err(CliError::Schema(format!(
                    "unknown family `{other}` (expected `explicit` or `kwise`)"
                )))
            }
        };
    let estimate = estimate_failure(
        &g,
        &h,
        big_n,
        alg.as_ref(),
        budget,
        &*family,
        master,
        trials,
    )
    .map_err(guard)?;

    let mut csv = CsvTable::new([
        "trials",
        "pairs",
        "failures",
        "rate",
        "bound",
        "sigma",
        "within_tolerance",
    ]);
    csv.push([
        estimate.trials.to_string(),
        estimate.pairs.to_string(),
        estimate.failures.to_string(),
        estimate.rate.to_string(),
        estimate.bound.value().to_string(),
        estimate.sigma.to_string(),
        estimate.within_tolerance.to_string(),
    ]);
    let config = EstimateConfig {
        graph: graph_desc.clone(),
        big_n,
        h: h_name.clone(),
        alg: alg_spec.clone(),
        budget,
        family: family_name.clone(),
        k,
        epsilon_log2,
        trials,
        seed: master,
    };
    let payload = EstimatePayload {
        graph: graph_desc,
        big_n,
        h: h_name,
        alg: alg_spec,
        budget,
        family: family_name,
        k,
        epsilon_log2,
        estimate,
    };
    emit(
        "estimate-failure",
        &config,
        master,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// derandomize-search

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DerandomizeSearchArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Largest real-graph order in the enumerated family (default 2).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Degree bound of the enumerated family (default 2).
    #[arg(long)]
    pub delta: Option<usize>,
    /// Virtual id-space size N (default 6).
    #[arg(long)]
    pub big_n: Option<u64>,
    /// Probe budget t (default 1).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Virtual graph on the padding ids: `empty` (default) or `cycle`.
    #[arg(long)]
    pub h: Option<String>,
    /// Probe routine to search a good permutation for, e.g. `fixed-id:5`.
    #[arg(long)]
    pub alg: Option<String>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(DerandomizeSearchArgs; n_max, delta, big_n, budget, h, alg, out);

#[derive(Serialize)]
struct DerandomizeConfig {
    n_max: usize,
    delta: usize,
    big_n: u64,
    budget: usize,
    h: String,
    alg: String,
}

#[derive(Serialize)]
struct DerandomizePayload {
    n_max: usize,
    delta: usize,
    big_n: u64,
    budget: usize,
    h: String,
    alg: String,
    graphs: usize,
    report: DerandomizationReport,
}

pub fn derandomize_search_cmd(args: DerandomizeSearchArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let n_max = args.n_max.unwrap_or(2);
    let delta = args.delta.unwrap_or(2);
    let big_n = args.big_n.unwrap_or(6);
    let budget = args.budget.unwrap_or(1);
    let h_name = args.h.unwrap_or_else(|| "empty".into());
    let h = parse_h(&h_name)?;
    let alg_spec = require(args.alg, "alg")?;
    let alg = make_lca(&alg_spec).map_err(CliError::Schema)?;

    let graphs = enumerate_bounded_graphs(n_max, delta).map_err(guard)?;
    let report = derandomize_search(&graphs, &h, big_n, budget, alg.as_ref()).map_err(guard)?;

    let mut csv = CsvTable::new([
        "total_perms",
        "good_perms",
        "good_fraction",
        "union_bound_prediction",
        "queries_per_perm",
    ]);
    csv.push([
        report.total_perms.to_string(),
        report.good_perms.to_string(),
        report.good_fraction.to_string(),
        report.union_bound_prediction.to_string(),
        report.queries_per_perm.to_string(),
    ]);
    let config = DerandomizeConfig {
        n_max,
        delta,
        big_n,
        budget,
        h: h_name.clone(),
        alg: alg_spec.clone(),
    };
    let payload = DerandomizePayload {
        n_max,
        delta,
        big_n,
        budget,
        h: h_name,
        alg: alg_spec,
        graphs: graphs.len(),
        report,
    };
    emit(
        "derandomize-search",
        &config,
        0,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// lowerbound

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerboundArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Base graph spec; the experiment runs on its copies-vs-cover pair.
    #[arg(long)]
    pub base: Option<String>,
    /// Probe budget t for every registered tree (default 2).
    #[arg(long)]
    pub t: Option<usize>,
    /// `exact` (default) or `sampled`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Samples per distribution in sampled mode (default 10000).
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed for sampled mode (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(LowerboundArgs; base, t, mode, samples, seed, out);

#[derive(Serialize)]
struct LowerboundConfig {
    base: String,
    t: usize,
    mode: String,
    samples: Option<u64>,
    seed: u64,
}

#[derive(Serialize)]
struct LowerboundRow {
    tree: String,
    query: u64,
    verdict: String,
    witness_hash: String,
}

#[derive(Serialize)]
struct LowerboundPayload {
    base: String,
    t: usize,
    mode: String,
    trees: Vec<String>,
    /// Exact mode only: whether every (tree, query) pair came out equal.
    all_equal: Option<bool>,
    gap: Option<GapReport>,
    queries: Vec<LowerboundRow>,
}

pub fn lowerbound(args: LowerboundArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let base = require(args.base, "base")?;
    let parsed = parse_graph_spec(&base).map_err(CliError::Schema)?;
    let g = generate(&parsed).map_err(schema)?;
    let t = args.t.unwrap_or(2);
    let mode_name = args.mode.unwrap_or_else(|| "exact".into());
    let master = args.seed.unwrap_or(0);
    let samples = args.samples.unwrap_or(10_000);

    let pair = build_pair(&g);
    let space = PerturbationSpace::new(pair.pairs);
    let trees = registered_trees(t, g.delta());
    let tree_names: Vec<String> = trees.iter().map(|t| t.id()).collect();

    let mut rows = Vec::new();
    let mut all_equal = true;
    for (ti, tree) in trees.iter().enumerate() {
        for v in 0..(2 * pair.pairs) as u64 {
            let index = (ti * 2 * pair.pairs) as u64 + v;
            let (mode_a, mode_b) = match mode_name.as_str() {
                "exact" => (DistributionMode::Exact, DistributionMode::Exact),
                "sampled" => (
                    DistributionMode::Sampled {
                        samples,
                        seed: derive_seed(master, "lowerbound-sample-a", index),
                    },
                    DistributionMode::Sampled {
                        samples,
                        seed: derive_seed(master, "lowerbound-sample-b", index),
                    },
                ),
                other => {
                    return Err(CliError::Schema(format!(
                        "unknown mode `{other}` (expected `exact` or `sampled`)"
                    )))
                }
            };
            let da = transcript_distribution(
                tree.as_ref(),
                &pair.two_copies,
                v,
                &space,
                Some(t),
                mode_a,
            )
            .map_err(guard)?;
            let db = transcript_distribution(
                tree.as_ref(),
                &pair.double_cover,
                v,
                &space,
                Some(t),
                mode_b,
            )
            .map_err(guard)?;
            let row = if mode_name == "exact" {
                match da.first_difference(&db) {
                    None => LowerboundRow {
                        tree: tree.id(),
                        query: v,
                        verdict: "equal".into(),
                        witness_hash: String::new(),
                    },
                    Some((_, witness)) => {
                        all_equal = false;
                        LowerboundRow {
                            tree: tree.id(),
                            query: v,
                            verdict: "distinguished".into(),
                            witness_hash: witness_hash(witness),
                        }
                    }
                }
            } else {
                // Sampled comparisons report distance only; empirical counts
                // carry estimation error, so no equality claim is made.
                LowerboundRow {
                    tree: tree.id(),
                    query: v,
                    verdict: format!("tv={:.6}", da.tv_distance(&db)),
                    witness_hash: String::new(),
                }
            };
            rows.push(row);
        }
    }

    let gap = if 2 * g.n() <= GAP_VERTEX_LIMIT {
        Some(gap_report(&g).map_err(guard)?)
    } else {
        None
    };

    let mut csv = CsvTable::new(["graph", "tree", "query", "t", "verdict", "witness_hash"]);
    for row in &rows {
        csv.push([
            base.clone(),
            row.tree.clone(),
            row.query.to_string(),
            t.to_string(),
            row.verdict.clone(),
            row.witness_hash.clone(),
        ]);
    }
    let config = LowerboundConfig {
        base: base.clone(),
        t,
        mode: mode_name.clone(),
        samples: (mode_name == "sampled").then_some(samples),
        seed: master,
    };
    let payload = LowerboundPayload {
        base,
        t,
        mode: mode_name.clone(),
        trees: tree_names,
        all_equal: (mode_name == "exact").then_some(all_equal),
        gap,
        queries: rows,
    };
    emit(
        "lowerbound",
        &config,
        master,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// perm-test

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PermTestArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Family to measure: `explicit`, `kwise`, or `lazy`.
    #[arg(long)]
    pub family: Option<String>,
    /// Size of the id space.
    #[arg(long)]
    pub n: Option<u64>,
    /// Tuple width k (default 2).
    #[arg(long)]
    pub k: Option<usize>,
    /// Declared closeness exponent for the kwise family (default 1).
    #[arg(long)]
    pub epsilon_log2: Option<u32>,
    /// Sampled ensemble size for the explicit family (default 4000).
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Master seed for sampled ensembles (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(PermTestArgs; family, n, k, epsilon_log2, seeds, seed, out);

#[derive(Serialize)]
struct PermTestConfig {
    family: String,
    n: u64,
    k: usize,
    epsilon_log2: Option<u32>,
    seeds: Option<u64>,
    seed: u64,
}

#[derive(Serialize)]
struct PermTestPayload {
    quality: FamilyQuality,
    within_declared: bool,
}

pub fn perm_test(args: PermTestArgs) -> Result<(), CliError> {
    let args = args.resolve()?;
    let family = require(args.family, "family")?;
    let n = require(args.n, "n")?;
    let k = args.k.unwrap_or(2);
    let master = args.seed.unwrap_or(0);
    let mut config = PermTestConfig {
        family: family.clone(),
        n,
        k,
        epsilon_log2: None,
        seeds: None,
        seed: master,
    };
    let quality = match family.as_str() {
        "explicit" => {
            let seeds = args.seeds.unwrap_or(4000);
            config.seeds = Some(seeds);
            explicit_quality_sampled(n, k, master, seeds).map_err(guard)?
        }
        "kwise" => {
            let e = args.epsilon_log2.unwrap_or(1);
            config.epsilon_log2 = Some(e);
            kwise_quality_exhaustive(n, k, e).map_err(guard)?
        }
        "lazy" => lazy_quality_exhaustive(n, k).map_err(guard)?,
        other => {
            return Err(CliError::Schema(format!(
                "unknown family `{other}` (expected `explicit`, `kwise`, or `lazy`)"
            )))
        }
    };
    let mut csv = CsvTable::new([
        "family",
        "n",
        "k",
        "declared_epsilon_log2",
        "measured_tv",
        "seeds",
        "exhaustive",
        "within_declared",
    ]);
    csv.push([
        quality.family.clone(),
        quality.n.to_string(),
        quality.k.to_string(),
        quality
            .declared_epsilon_log2
            .map_or_else(String::new, |e| e.to_string()),
        quality.measured_tv.to_string(),
        quality.seeds.to_string(),
        quality.exhaustive.to_string(),
        quality.within_declared().to_string(),
    ]);
    let payload = PermTestPayload {
        within_declared: quality.within_declared(),
        quality,
    };
    emit(
        "perm-test",
        &config,
        master,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}

// ---------------------------------------------------------------------------
// two-path-gap

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoPathGapArgs {
    /// JSON file holding these fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Instance size (default 10, minimum 6).
    #[arg(long)]
    pub n: Option<usize>,
    /// Seeded (instance, query order) trials (default 100).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
resolvable!(TwoPathGapArgs; n, trials, seed, out);

#[derive(Serialize)]
struct TwoPathGapConfig {
    n: usize,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct TwoPathTrialRow {
    trial: u64,
    leaders: usize,
    max_probes: usize,
}

#[derive(Serialize)]
struct TwoPathGapPayload {
    n: usize,
    trials: u64,
    /// Worst per-query probe count of the state-full routine (always 1).
    stateful_max_probes: usize,
    /// Whether every trial elected exactly one leader.
    single_leader_every_trial: bool,
    /// Worst-case probe count of the stateless scan on the adversarial
    /// instance — grows linearly with n.
    stateless_worst_probes: usize,
    trials_detail: Vec<TwoPathTrialRow>,
}

pub fn two_path_gap(args: TwoPathGapArgs) -> Result<(), CliError> {
    use locality_lab::algo::{worst_case_two_path, StatefulTwoPathLeader, TwoPathScan};

    let args = args.resolve()?;
    let n = args.n.unwrap_or(10);
    let trials = args.trials.unwrap_or(100).max(1);
    let master = args.seed.unwrap_or(0);

    let mut detail = Vec::with_capacity(trials as usize);
    let mut stateful_max_probes = 0usize;
    let mut single_leader_every_trial = true;
    for trial in 0..trials {
        let g = generate(&GraphSpec::TwoPath {
            n,
            seed: derive_seed(master, "two-path-instance", trial),
        })
        .map_err(schema)?;
        let mut order: Vec<u64> = (0..n as u64).collect();
        order.shuffle(&mut stream_rng(master, "two-path-order", trial));
        let alg = StatefulTwoPathLeader;
        let mut ctx = LcaContext::for_algorithm(&alg, n as u64, SeedBits::empty());
        let run = run_lca(&alg, &g, &order, &mut ctx).map_err(guard)?;
        let leaders = run.answers.iter().filter(|&&a| a == 1).count();
        let max_probes = run
            .transcripts
            .iter()
            .map(|t| t.total_probes())
            .max()
            .unwrap_or(0);
        stateful_max_probes = stateful_max_probes.max(max_probes);
        single_leader_every_trial &= leaders == 1;
        detail.push(TwoPathTrialRow {
            trial,
            leaders,
            max_probes,
        });
    }

    let worst = worst_case_two_path(n).map_err(schema)?;
    let scan = run_partree(&TwoPathScan, &worst, None).map_err(guard)?;
    let stateless_worst_probes = scan
        .transcripts
        .iter()
        .map(|t| t.total_probes())
        .max()
        .unwrap_or(0);

    let mut csv = CsvTable::new(["trial", "leaders", "max_probes"]);
    for row in &detail {
        csv.push([
            row.trial.to_string(),
            row.leaders.to_string(),
            row.max_probes.to_string(),
        ]);
    }
    let config = TwoPathGapConfig {
        n,
        trials,
        seed: master,
    };
    let payload = TwoPathGapPayload {
        n,
        trials,
        stateful_max_probes,
        single_leader_every_trial,
        stateless_worst_probes,
        trials_detail: detail,
    };
    emit(
        "two-path-gap",
        &config,
        master,
        None,
        payload,
        &csv,
        args.out.as_deref(),
    )
}
