//! `tfpack` command line: instance generation, packing, subdivision search,
//! oracle queries, experiments and calibration sweeps.
//!
//! Exit status: 0 on success, 1 when an invariant check fails, 2 on
//! configuration or I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tfpack::cross_check::cross_check;
use tfpack::finder::{find_subdivision, FindOutcome, FinderBudget, Strategy};
use tfpack::generators::{gen_lower_bound_gadget_with, gen_named, gen_random_regular, BlockVariant};
use tfpack::graph::HostGraph;
use tfpack::harness::{calibrate, run_experiment, write_csv, write_outputs, ExperimentSpec, HarnessError, THREADS_ENV};
use tfpack::io::{format_edge_list, read_edge_list, write_edge_list};
use tfpack::oracle::{enumerate_subdivisions, optimal_packing, subdivision_exists, OracleLimits};
use tfpack::packer::{family_violations, pack_full, PackerConfig};
use tfpack::pattern::{PatternGraph, PatternSpec};
use tfpack::witness::{validate_packing, validate_witness};

#[derive(Parser)]
#[command(name = "tfpack", version, about = "Pack vertex-disjoint subdivisions of a small pattern into a host graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a host graph as an edge list.
    Gen(GenArgs),
    /// Pack pattern subdivisions into a host graph.
    Pack(PackArgs),
    /// Search for a single pattern subdivision.
    FindSubdiv(FindArgs),
    /// Exact answers on tiny graphs.
    Oracle(OracleArgs),
    /// Run an experiment spec and write one CSV row per run.
    Experiment(ExperimentArgs),
    /// Grid-search packer parameters and report the best cell.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    RandomRegular,
    Gadget,
    Named,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockArg {
    PerfectMatching,
    HamiltonCycle,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "random-regular")]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Catalog name for `--kind named` (K5, C7, K3,3, petersen, ...).
    #[arg(long)]
    name: Option<String>,
    /// Edges removed from each gadget block before the swap; the
    /// Hamilton-cycle form leaves block vertices at degree `d - 1`.
    #[arg(long, value_enum, default_value = "perfect-matching")]
    block: BlockArg,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PackerFlags {
    /// TOML file with packer settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    u_prime_fraction: Option<f64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    DenseGreedy,
    Auto,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::DenseGreedy => Strategy::DenseGreedy,
            StrategyArg::Auto => Strategy::Auto,
        }
    }
}

#[derive(clap::Args)]
struct PackArgs {
    /// Host graph edge list.
    #[arg(long)]
    graph: PathBuf,
    /// Pattern id (`C4`, `K4`, `K4+iso`, ...) or a pattern JSON file.
    #[arg(long)]
    pattern: String,
    #[command(flatten)]
    packer: PackerFlags,
    /// Packing JSON output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Run statistics as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FindArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value_t = 1_000_000)]
    node_budget: u64,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    /// Witness JSON output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Exists,
    Enumerate,
    Optimal,
    CrossCheck,
}

#[derive(clap::Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pattern: String,
    #[arg(long, value_enum, default_value = "optimal")]
    mode: OracleMode,
    #[arg(long, default_value_t = 12)]
    max_n: usize,
    #[arg(long, default_value_t = 6)]
    max_pattern_edges: usize,
    /// Search nodes the oracle may visit.
    #[arg(long, default_value_t = 500_000_000)]
    oracle_budget: u64,
    #[command(flatten)]
    packer: PackerFlags,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment spec (TOML).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Override of the spec's CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override of the spec's packing directory.
    #[arg(long)]
    packings: Option<PathBuf>,
    #[arg(long)]
    seed_base: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(clap::Args)]
struct CalibrateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Calibration report (JSON) output.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PackerDocument {
    p: Option<f64>,
    m: Option<usize>,
    gamma: Option<f64>,
    epsilon: Option<f64>,
    u_prime_fraction: Option<f64>,
    node_budget: Option<u64>,
    strategy: Option<Strategy>,
    candidate_width: Option<usize>,
    seed: Option<u64>,
    max_outer_rounds: Option<usize>,
    patience: Option<usize>,
    eta: Option<f64>,
}

impl From<PackerConfig> for PackerDocument {
    fn from(c: PackerConfig) -> Self {
        PackerDocument {
            p: Some(c.p),
            m: Some(c.m),
            gamma: Some(c.gamma),
            epsilon: Some(c.epsilon),
            u_prime_fraction: c.u_prime_fraction,
            node_budget: Some(c.finder.node_budget),
            strategy: Some(c.finder.strategy),
            candidate_width: Some(c.finder.candidate_width),
            seed: None,
            max_outer_rounds: Some(c.max_outer_rounds),
            patience: Some(c.patience),
            eta: None,
        }
    }
}

/// Failures split by exit status.
enum Failure {
    Invariant(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Usage(e.into())
    }
}

type Outcome = Result<(), Failure>;

const DEFAULT_ETA: f64 = 0.1;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Pack(a) => cmd_pack(a),
        Command::FindSubdiv(a) => cmd_find(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Calibrate(a) => cmd_calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

/// The error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !text.contains(&msg) {
            if !text.is_empty() {
                text.push_str(": ");
            }
            text.push_str(&msg);
        }
    }
    text
}

/// Writes to stdout, treating a closed pipe as success.
fn stdout_write(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => stdout_write(&format!("{text}\n")),
    }
}

fn load_graph(path: &Path) -> anyhow::Result<HostGraph> {
    Ok(read_edge_list(path)?)
}

fn load_pattern(id: &str) -> anyhow::Result<Arc<PatternGraph>> {
    let path = Path::new(id);
    if id.ends_with(".json") && path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {id}"))?;
        let spec: PatternSpec = serde_json::from_str(&text).with_context(|| format!("{id}: bad pattern JSON"))?;
        return Ok(Arc::new(PatternGraph::try_from(spec).with_context(|| format!("{id}: bad pattern graph"))?));
    }
    Ok(Arc::new(PatternGraph::from_id(id).with_context(|| format!("unknown pattern `{id}`"))?))
}

/// Defaults, then the config file, then flags.
fn packer_config(flags: &PackerFlags) -> anyhow::Result<(PackerConfig, f64)> {
    let doc: PackerDocument = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("{}: invalid packer config", path.display()))?
        }
        None => PackerDocument::default(),
    };
    let mut cfg = PackerConfig::default();
    let pick = |flag: Option<f64>, file: Option<f64>, dflt: f64| flag.or(file).unwrap_or(dflt);
    cfg.p = pick(flags.p, doc.p, cfg.p);
    cfg.gamma = pick(flags.gamma, doc.gamma, cfg.gamma);
    cfg.epsilon = pick(flags.epsilon, doc.epsilon, cfg.epsilon);
    cfg.m = flags.m.or(doc.m).unwrap_or(cfg.m);
    cfg.u_prime_fraction = flags.u_prime_fraction.or(doc.u_prime_fraction).or(cfg.u_prime_fraction);
    cfg.finder.node_budget = flags.node_budget.or(doc.node_budget).unwrap_or(cfg.finder.node_budget);
    cfg.finder.strategy = flags.strategy.map(Strategy::from).or(doc.strategy).unwrap_or(cfg.finder.strategy);
    cfg.finder.candidate_width = doc.candidate_width.unwrap_or(cfg.finder.candidate_width);
    cfg.seed = flags.seed.or(doc.seed).unwrap_or(cfg.seed);
    cfg.max_outer_rounds = doc.max_outer_rounds.unwrap_or(cfg.max_outer_rounds);
    cfg.patience = doc.patience.unwrap_or(cfg.patience);
    let eta = pick(flags.eta, doc.eta, DEFAULT_ETA);
    cfg.validate()?;
    if !(0.0..=1.0).contains(&eta) {
        bail!("eta = {eta} must lie in [0, 1]");
    }
    Ok((cfg, eta))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let (g, note) = match a.kind {
        GenKind::RandomRegular => (gen_random_regular(a.n, a.d, a.seed).map_err(anyhow::Error::from)?, String::new()),
        GenKind::Gadget => {
            let variant = match a.block {
                BlockArg::PerfectMatching => BlockVariant::PerfectMatching,
                BlockArg::HamiltonCycle => BlockVariant::HamiltonCycle,
            };
            let gadget = gen_lower_bound_gadget_with(a.d, variant).map_err(anyhow::Error::from)?;
            (gadget.graph, format!(", marked u={} v={}", gadget.u, gadget.v))
        }
        GenKind::Named => {
            let Some(name) = a.name.as_deref() else {
                return Err(Failure::Usage(anyhow::anyhow!("--kind named needs --name")));
            };
            (gen_named(name).map_err(anyhow::Error::from)?, String::new())
        }
    };
    match &a.out {
        Some(path) => {
            write_edge_list(&g, path).map_err(anyhow::Error::from)?;
            eprintln!("wrote {} (n={}, m={}{note})", path.display(), g.n(), g.m());
        }
        None => stdout_write(&format_edge_list(&g))?,
    }
    Ok(())
}

fn cmd_pack(a: PackArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let pattern = load_pattern(&a.pattern)?;
    let (cfg, eta) = packer_config(&a.packer)?;
    let out = pack_full(&g, &pattern, &cfg, eta).map_err(anyhow::Error::from)?;
    let json = out.packing.to_json();
    emit(&json, a.out.as_deref())?;

    let report = validate_packing(&g, &out.packing);
    let mut failures: Vec<String> = report.reasons.iter().map(|r| format!("{r:?}")).collect();
    if let Some(core) = &out.core {
        failures.extend(core.stats.invariant_failures.iter().cloned());
        failures.extend(family_violations(g.n(), &core.packing, &core.w, &core.paths, cfg.m));
    }
    let stats = json!({
        "n": g.n(),
        "pattern": pattern.name(),
        "config": cfg,
        "eta": eta,
        "coverage": out.coverage(),
        "witnesses": out.packing.witnesses.len(),
        "valid": report.valid,
        "invariants_ok": failures.is_empty(),
        "prefix": out.prefix,
        "core": out.core.as_ref().map(|c| &c.stats),
    });
    let stats_text = serde_json::to_string_pretty(&stats).map_err(anyhow::Error::from)?;
    match &a.stats {
        Some(path) => emit(&stats_text, Some(path))?,
        None if a.out.is_some() => eprintln!(
            "coverage {:.4} with {} witnesses",
            out.coverage(),
            out.packing.witnesses.len()
        ),
        None => {}
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failures.join("; ")))
    }
}

fn cmd_find(a: FindArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let pattern = load_pattern(&a.pattern)?;
    let budget = FinderBudget { node_budget: a.node_budget, strategy: a.strategy.into(), ..FinderBudget::default() };
    let value = match find_subdivision(&g, &pattern, budget) {
        Ok(FindOutcome::Found(w)) => {
            let check = validate_witness(&g, &w);
            if !check.is_valid() {
                return Err(Failure::Invariant(format!("finder returned an invalid witness: {:?}", check.reasons)));
            }
            json!({ "status": "found", "witness": w })
        }
        Ok(FindOutcome::NotFound { certified }) => json!({ "status": "not_found", "certified": certified }),
        Err(tfpack::finder::FinderError::BudgetExhausted { nodes }) => {
            json!({ "status": "budget_exhausted", "nodes": nodes })
        }
        Err(e) => return Err(Failure::Usage(e.into())),
    };
    emit(&serde_json::to_string_pretty(&value).map_err(anyhow::Error::from)?, a.out.as_deref())?;
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let pattern = load_pattern(&a.pattern)?;
    let limits = OracleLimits { max_n: a.max_n, max_pattern_edges: a.max_pattern_edges, node_budget: a.oracle_budget };
    let value = match a.mode {
        OracleMode::Exists => json!({ "exists": subdivision_exists(&g, &pattern, &limits).map_err(anyhow::Error::from)? }),
        OracleMode::Enumerate => {
            let all = enumerate_subdivisions(&g, &pattern, &limits).map_err(anyhow::Error::from)?;
            json!({ "count": all.len(), "witnesses": all })
        }
        OracleMode::Optimal => serde_json::to_value(optimal_packing(&g, &pattern, &limits).map_err(anyhow::Error::from)?)
            .map_err(anyhow::Error::from)?,
        OracleMode::CrossCheck => {
            let (cfg, _) = packer_config(&a.packer)?;
            let report = cross_check(&g, &pattern, &cfg, &limits).map_err(anyhow::Error::from)?;
            let text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
            emit(&text, a.out.as_deref())?;
            return if report.all_ok() {
                Ok(())
            } else {
                Err(Failure::Invariant("cross-check disagreement".into()))
            };
        }
    };
    emit(&serde_json::to_string_pretty(&value).map_err(anyhow::Error::from)?, a.out.as_deref())?;
    Ok(())
}

fn load_spec(run: &RunArgs) -> Result<ExperimentSpec, Failure> {
    let mut spec = ExperimentSpec::from_file(&run.spec)?;
    if let Some(csv) = &run.csv {
        spec.output.csv = Some(csv.clone());
    }
    if let Some(dir) = &run.packings {
        spec.output.packings = Some(dir.clone());
    }
    if let Some(s) = run.seed_base {
        spec.seed_base = s;
    }
    if let Some(r) = run.repetitions {
        spec.repetitions = r;
    }
    Ok(spec)
}

fn cmd_experiment(a: ExperimentArgs) -> Outcome {
    let spec = load_spec(&a.run)?;
    let output = run_experiment(&spec, a.run.threads)?;
    if spec.output.csv.is_none() {
        let mut buf = Vec::new();
        write_csv(&output.rows, &mut buf)?;
        stdout_write(&String::from_utf8_lossy(&buf))?;
    }
    write_outputs(&output, &spec.output)?;
    let failed: Vec<String> = output
        .rows
        .iter()
        .filter(|r| !r.all_invariants_ok)
        .map(|r| format!("{} cell {} seed {}: {}", r.instance, r.cell, r.seed, r.error))
        .collect();
    eprintln!("{} runs, {} with invariant failures", output.rows.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failed.join("\n")))
    }
}

fn cmd_calibrate(a: CalibrateArgs) -> Outcome {
    let spec = load_spec(&a.run)?;
    let report = match calibrate(&spec, a.run.threads) {
        Ok(r) => r,
        Err(HarnessError::NoAdmissibleCell) => return Err(Failure::Invariant(HarnessError::NoAdmissibleCell.to_string())),
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &spec.output.csv {
        let file = std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        write_csv(&report.rows, std::io::BufWriter::new(file))?;
    }
    if let Some(path) = &a.report {
        let text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
        emit(&text, Some(path))?;
    }
    for cell in &report.cells {
        let status = cell.excluded.as_deref().unwrap_or("ok");
        eprintln!(
            "cell {:>3}: p={} m={} gamma={} eps={} p1={} budget={} mean coverage {:.4} ({status})",
            cell.cell,
            cell.config.p,
            cell.config.m,
            cell.config.gamma,
            cell.config.epsilon,
            cell.config.p1(),
            cell.config.finder.node_budget,
            cell.mean_coverage
        );
    }
    let recommended = toml::to_string(&PackerDocument::from(report.recommended)).map_err(anyhow::Error::from)?;
    stdout_write(&format!("# recommended (cell {})\n{recommended}", report.recommended_cell))?;
    Ok(())
}
