//! Experiment orchestration: a declarative spec (TOML) expands into
//! instance × config × repetition jobs that run in parallel and produce one
//! CSV row each. Calibration ranks the config cells by mean coverage.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{GenError, GenKind, GenSpec};
use crate::graph::HostGraph;
use crate::io::{read_edge_list, EdgeListError};
use crate::packer::{family_violations, pack_full, FullOutcome, PackerConfig, PackerError};
use crate::pattern::PatternGraph;
use crate::witness::{validate_packing, Packing};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "TFPACK_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Input(#[from] EdgeListError),
    #[error("instance {label}: {source}")]
    Generate {
        label: String,
        #[source]
        source: GenError,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("no grid cell is admissible: every cell had invariant failures or resampling exhaustion")]
    NoAdmissibleCell,
}

fn config_err(field: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Config { field: field.into(), message: message.into() }
}

/// Where an instance comes from: an edge-list file or a generator spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    File { file: PathBuf },
    Generated(GenSpec),
}

impl InstanceSource {
    pub fn label(&self) -> String {
        match self {
            InstanceSource::File { file } => file.display().to_string(),
            InstanceSource::Generated(g) => match g.kind {
                GenKind::RandomRegular => format!("random_regular(n={},d={},seed={})", g.n, g.d, g.seed),
                GenKind::Gadget => format!("gadget(d={})", g.d),
                GenKind::Named => format!("named({})", g.name.as_deref().unwrap_or("")),
            },
        }
    }
}

/// Lists of values per packer parameter; a missing list keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigGrid {
    pub p: Option<Vec<f64>>,
    pub m: Option<Vec<usize>>,
    pub gamma: Option<Vec<f64>>,
    pub epsilon: Option<Vec<f64>>,
    pub u_prime_fraction: Option<Vec<f64>>,
    pub node_budget: Option<Vec<u64>>,
}

fn axis<T: Copy>(name: &str, list: &Option<Vec<T>>, base: T) -> Result<Vec<T>, HarnessError> {
    match list {
        None => Ok(vec![base]),
        Some(v) if v.is_empty() => Err(config_err(format!("grid.{name}"), "list is empty")),
        Some(v) => Ok(v.clone()),
    }
}

impl ConfigGrid {
    /// Cartesian product over the lists, in the order p, m, gamma, epsilon,
    /// u_prime_fraction, node_budget (last varies fastest).
    pub fn cells(&self, base: &PackerConfig) -> Result<Vec<PackerConfig>, HarnessError> {
        let ps = axis("p", &self.p, base.p)?;
        let ms = axis("m", &self.m, base.m)?;
        let gammas = axis("gamma", &self.gamma, base.gamma)?;
        let epss = axis("epsilon", &self.epsilon, base.epsilon)?;
        let p1s: Vec<Option<f64>> = match &self.u_prime_fraction {
            None => vec![base.u_prime_fraction],
            Some(v) if v.is_empty() => return Err(config_err("grid.u_prime_fraction", "list is empty")),
            Some(v) => v.iter().map(|&x| Some(x)).collect(),
        };
        let budgets = axis("node_budget", &self.node_budget, base.finder.node_budget)?;
        let mut out = Vec::new();
        for &p in &ps {
            for &m in &ms {
                for &gamma in &gammas {
                    for &epsilon in &epss {
                        for &u_prime_fraction in &p1s {
                            for &node_budget in &budgets {
                                let mut cfg = PackerConfig { p, m, gamma, epsilon, u_prime_fraction, ..*base };
                                cfg.finder.node_budget = node_budget;
                                out.push(cfg);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    /// Directory receiving one packing JSON per run.
    pub packings: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn default_eta() -> f64 {
    0.1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub instances: Vec<InstanceSource>,
    pub pattern: String,
    #[serde(default)]
    pub base: PackerConfig,
    #[serde(default)]
    pub grid: ConfigGrid,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// Coverage slack handed to the isolated-vertex driver.
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Draw a fresh random instance per repetition (generator seed + rep).
    #[serde(default = "yes")]
    pub resample_instances: bool,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentSpec {
    pub fn new(instances: Vec<InstanceSource>, pattern: impl Into<String>) -> Self {
        Self {
            instances,
            pattern: pattern.into(),
            base: PackerConfig::default(),
            grid: ConfigGrid::default(),
            repetitions: 1,
            seed_base: 0,
            eta: default_eta(),
            resample_instances: true,
            output: OutputPaths::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| config_err("<document>", e.to_string().trim_end()))
    }

    /// Loads a spec file; relative instance and output paths resolve
    /// against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        let mut spec = Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config { field, message } => {
                HarnessError::Config { field, message: format!("{}: {message}", path.display()) }
            }
            other => other,
        })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        for inst in &mut spec.instances {
            if let InstanceSource::File { file } = inst {
                rebase(file);
            }
        }
        spec.output.csv.as_mut().map(rebase);
        spec.output.packings.as_mut().map(rebase);
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(Arc<PatternGraph>, Vec<PackerConfig>), HarnessError> {
        if self.instances.is_empty() {
            return Err(config_err("instances", "at least one instance is required"));
        }
        if self.repetitions == 0 {
            return Err(config_err("repetitions", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(config_err("eta", format!("{} must lie in [0, 1]", self.eta)));
        }
        let pattern = PatternGraph::from_id(&self.pattern).map_err(|e| config_err("pattern", e.to_string()))?;
        self.base.validate().map_err(|e| config_err("base", e.to_string()))?;
        let cells = self.grid.cells(&self.base)?;
        for (i, c) in cells.iter().enumerate() {
            c.validate().map_err(|e| config_err(format!("grid (cell {i})"), e.to_string()))?;
        }
        Ok((Arc::new(pattern), cells))
    }
}

/// One CSV row per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance: String,
    pub cell: usize,
    pub n: usize,
    pub d: f64,
    pub pattern: String,
    pub p: f64,
    pub m: usize,
    pub eps: f64,
    pub gamma: f64,
    pub p1: f64,
    pub node_budget: u64,
    pub seed: u64,
    pub coverage: f64,
    pub rounds: usize,
    pub j_final: usize,
    pub aux_density: f64,
    pub witnesses: usize,
    pub wall_ms: u64,
    /// Both resampling stages met their constraints.
    pub resample_ok: bool,
    pub all_invariants_ok: bool,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<Row>,
    /// `(file stem, packing JSON)` per row, in row order.
    pub packings: Vec<(String, String)>,
}

/// Worker count: `explicit`, else the environment variable, else all cores.
pub fn thread_count(explicit: Option<usize>) -> Result<usize, HarnessError> {
    if let Some(t) = explicit {
        return if t == 0 { Err(config_err("threads", "must be at least 1")) } else { Ok(t) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(config_err(THREADS_ENV, format!("`{s}` is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn load_instance(src: &InstanceSource, rep: usize, resample: bool) -> Result<(String, HostGraph), HarnessError> {
    match src {
        InstanceSource::File { file } => Ok((src.label(), read_edge_list(file)?)),
        InstanceSource::Generated(spec) => {
            let mut spec = spec.clone();
            if resample && spec.kind == GenKind::RandomRegular {
                spec.seed = spec.seed.wrapping_add(rep as u64);
            }
            let label = InstanceSource::Generated(spec.clone()).label();
            let g = spec.generate().map_err(|source| HarnessError::Generate { label: label.clone(), source })?;
            Ok((label, g))
        }
    }
}

/// Packs once and rechecks the result from its serialized form.
pub fn run_single(
    label: &str,
    g: &HostGraph,
    pattern: &Arc<PatternGraph>,
    cfg: &PackerConfig,
    eta: f64,
    cell: usize,
) -> (Row, String) {
    let start = Instant::now();
    let result = pack_full(g, pattern, cfg, eta);
    let wall_ms = start.elapsed().as_millis() as u64;
    evaluate(label, g, pattern, cfg, cell, &result, wall_ms)
}

/// Builds the row for a finished run: revalidates the packing from its JSON
/// and collects every invariant failure. Returns the row and that JSON.
pub fn evaluate(
    label: &str,
    g: &HostGraph,
    pattern: &Arc<PatternGraph>,
    cfg: &PackerConfig,
    cell: usize,
    result: &Result<FullOutcome, PackerError>,
    wall_ms: u64,
) -> (Row, String) {
    let mut row = Row {
        instance: label.to_string(),
        cell,
        n: g.n(),
        d: g.average_degree(),
        pattern: pattern.name().to_string(),
        p: cfg.p,
        m: cfg.m,
        eps: cfg.epsilon,
        gamma: cfg.gamma,
        p1: cfg.p1(),
        node_budget: cfg.finder.node_budget,
        seed: cfg.seed,
        coverage: 0.0,
        rounds: 0,
        j_final: 0,
        aux_density: 0.0,
        witnesses: 0,
        wall_ms,
        resample_ok: false,
        all_invariants_ok: false,
        error: String::new(),
    };
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            row.error = e.to_string();
            return (row, Packing::new(g.n()).to_json());
        }
    };
    let json = out.packing.to_json();
    let mut problems = Vec::new();
    match Packing::from_json(&json) {
        Ok(back) => {
            let report = validate_packing(g, &back);
            if !report.valid {
                problems.push(format!("packing invalid: {:?}", report.reasons));
            }
            if back != out.packing {
                problems.push("packing JSON does not round-trip".to_string());
            }
        }
        Err(e) => problems.push(format!("packing JSON unreadable: {e}")),
    }
    row.resample_ok = true;
    if let Some(core) = &out.core {
        let s = &core.stats;
        row.rounds = s.rounds;
        row.j_final = s.j_final;
        row.aux_density = s.aux_density;
        row.resample_ok = s.split_ok && s.cover.as_ref().map_or(true, |c| c.partition_ok);
        problems.extend(s.invariant_failures.iter().cloned());
        if !s.invariants_ok && s.invariant_failures.is_empty() {
            problems.push("packer reported an invariant failure".to_string());
        }
        problems.extend(family_violations(g.n(), &core.packing, &core.w, &core.paths, cfg.m));
    }
    row.coverage = out.coverage();
    row.witnesses = out.packing.witnesses.len();
    row.all_invariants_ok = problems.is_empty();
    row.error = problems.join("; ");
    (row, json)
}

/// Runs every (instance, cell, repetition) job on `threads` workers. Rows
/// come back in job order regardless of scheduling.
pub fn run_experiment(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ExperimentOutput, HarnessError> {
    let (pattern, cells) = spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(threads)?)
        .build()
        .map_err(|e| config_err("threads", e.to_string()))?;
    pool.install(|| {
        let reps = spec.repetitions;
        let slots: Vec<(usize, usize)> =
            (0..spec.instances.len()).flat_map(|i| (0..reps).map(move |r| (i, r))).collect();
        let graphs: Vec<(String, HostGraph)> = slots
            .par_iter()
            .map(|&(i, r)| load_instance(&spec.instances[i], r, spec.resample_instances))
            .collect::<Result<_, _>>()?;
        let jobs: Vec<(usize, usize, usize)> = (0..spec.instances.len())
            .flat_map(|i| (0..cells.len()).flat_map(move |c| (0..reps).map(move |r| (i, c, r))))
            .collect();
        let results: Vec<(Row, String)> = jobs
            .par_iter()
            .map(|&(i, c, r)| {
                let (label, g) = &graphs[i * reps + r];
                let seed = spec.seed_base.wrapping_add(r as u64);
                let cfg = PackerConfig { seed, ..cells[c] };
                run_single(label, g, &pattern, &cfg, spec.eta, c)
            })
            .collect();
        let mut rows = Vec::with_capacity(results.len());
        let mut packings = Vec::with_capacity(results.len());
        for (&(i, c, r), (row, json)) in jobs.iter().zip(results) {
            packings.push((format!("inst{i}_cell{c}_rep{r}"), json));
            rows.push(row);
        }
        Ok(ExperimentOutput { rows, packings })
    })
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: PathBuf::from("<csv>"), source })?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Row>, HarnessError> {
    csv::Reader::from_reader(input).deserialize().collect::<Result<_, _>>().map_err(HarnessError::from)
}

/// Writes the CSV and packing files named in `paths`.
pub fn write_outputs(output: &ExperimentOutput, paths: &OutputPaths) -> Result<(), HarnessError> {
    if let Some(path) = &paths.csv {
        let io_err = |source| HarnessError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
        let file = std::fs::File::create(path).map_err(io_err)?;
        write_csv(&output.rows, std::io::BufWriter::new(file))?;
    }
    if let Some(dir) = &paths.packings {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.clone(), source })?;
        for (stem, json) in &output.packings {
            let path = dir.join(format!("{stem}.json"));
            std::fs::write(&path, json).map_err(|source| HarnessError::Io { path, source })?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: usize,
    pub config: PackerConfig,
    pub runs: usize,
    pub mean_coverage: f64,
    pub invariant_failures: usize,
    pub resample_failures: usize,
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub recommended: PackerConfig,
    pub recommended_cell: usize,
    pub cells: Vec<CellSummary>,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

/// Summarises rows per cell and picks the admissible cell of highest mean
/// coverage (earliest cell on ties).
pub fn summarise_cells(rows: &[Row], cells: &[PackerConfig]) -> Vec<CellSummary> {
    cells
        .iter()
        .enumerate()
        .map(|(c, cfg)| {
            let mine: Vec<&Row> = rows.iter().filter(|r| r.cell == c).collect();
            let runs = mine.len();
            let mean_coverage =
                if runs == 0 { 0.0 } else { mine.iter().map(|r| r.coverage).sum::<f64>() / runs as f64 };
            let invariant_failures = mine.iter().filter(|r| !r.all_invariants_ok).count();
            let resample_failures = mine.iter().filter(|r| !r.resample_ok).count();
            let excluded = if invariant_failures > 0 {
                Some(format!("{invariant_failures} run(s) failed invariants"))
            } else if resample_failures > 0 {
                Some(format!("{resample_failures} run(s) exhausted the resampling budget"))
            } else if runs == 0 {
                Some("no runs".to_string())
            } else {
                None
            };
            CellSummary { cell: c, config: PackerConfig { seed: 0, ..*cfg }, runs, mean_coverage, invariant_failures, resample_failures, excluded }
        })
        .collect()
}

pub fn calibrate(spec: &ExperimentSpec, threads: Option<usize>) -> Result<CalibrationReport, HarnessError> {
    let (_, cells) = spec.validate()?;
    let output = run_experiment(spec, threads)?;
    let summaries = summarise_cells(&output.rows, &cells);
    let best = summaries
        .iter()
        .filter(|s| s.excluded.is_none())
        .fold(None::<&CellSummary>, |best, s| match best {
            Some(b) if b.mean_coverage >= s.mean_coverage => Some(b),
            _ => Some(s),
        })
        .ok_or(HarnessError::NoAdmissibleCell)?;
    Ok(CalibrationReport {
        recommended: best.config,
        recommended_cell: best.cell,
        cells: summaries,
        rows: output.rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(vec![InstanceSource::Generated(GenSpec::random_regular(400, 48, 1))], "C3");
        spec.repetitions = 3;
        spec.base.m = 4;
        spec
    }

    #[test]
    fn three_seeds_give_three_deterministic_rows() {
        let spec = small_spec();
        let a = run_experiment(&spec, Some(2)).unwrap();
        let b = run_experiment(&spec, Some(1)).unwrap();
        assert_eq!(a.rows.len(), 3);
        let strip = |rows: &[Row]| rows.iter().map(|r| Row { wall_ms: 0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&a.rows), strip(&b.rows));
        assert_eq!(a.packings, b.packings);
        assert!(a.rows.iter().all(|r| r.all_invariants_ok), "{:?}", a.rows);
        assert_eq!(a.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn csv_round_trips() {
        let out = run_experiment(&small_spec(), Some(1)).unwrap();
        let mut buf = Vec::new();
        write_csv(&out.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("instance,cell,n,d,pattern,p,m,eps,gamma,"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), out.rows);
    }

    #[test]
    fn grid_expands_in_order() {
        let grid = ConfigGrid { p: Some(vec![0.2, 0.3]), m: Some(vec![4, 8, 12]), ..ConfigGrid::default() };
        let cells = grid.cells(&PackerConfig::default()).unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!((cells[0].p, cells[0].m), (0.2, 4));
        assert_eq!((cells[5].p, cells[5].m), (0.3, 12));
        let empty = ConfigGrid { gamma: Some(vec![]), ..ConfigGrid::default() };
        assert!(matches!(empty.cells(&PackerConfig::default()), Err(HarnessError::Config { field, .. }) if field == "grid.gamma"));
    }

    #[test]
    fn toml_spec_parses_and_validates() {
        let text = r#"
            pattern = "C4"
            repetitions = 2
            instances = [
                { kind = "random_regular", n = 200, d = 16, seed = 4 },
                { file = "graphs/a.txt" },
            ]
            [base]
            m = 6
            [grid]
            p = [0.2, 0.25]
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        assert_eq!(spec.base.m, 6);
        assert!(matches!(&spec.instances[1], InstanceSource::File { file } if file == Path::new("graphs/a.txt")));
        assert_eq!(spec.validate().unwrap().1.len(), 2);

        let bad = ExperimentSpec::from_toml_str("pattern = \"C4\"\ninstances = []\nbogus = 1\n");
        assert!(matches!(bad, Err(HarnessError::Config { .. })));
        let mut spec = spec;
        spec.repetitions = 0;
        assert!(matches!(spec.validate(), Err(HarnessError::Config { field, .. }) if field == "repetitions"));
        spec.repetitions = 1;
        spec.pattern = "Q9".into();
        assert!(matches!(spec.validate(), Err(HarnessError::Config { field, .. }) if field == "pattern"));
    }

    #[test]
    fn malformed_graph_file_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "3 2\n0 1\n1 x\n").unwrap();
        let spec = ExperimentSpec::new(vec![InstanceSource::File { file: path.clone() }], "C3");
        let msg = run_experiment(&spec, Some(1)).unwrap_err().to_string();
        assert!(msg.contains("bad.txt") && msg.contains(":3"), "{msg}");
    }

    #[test]
    fn one_cell_grid_is_recommended() {
        let report = calibrate(&small_spec(), Some(1)).unwrap();
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.recommended_cell, 0);
        assert_eq!(report.recommended, PackerConfig { m: 4, ..PackerConfig::default() });
    }

    #[test]
    fn failing_cells_are_excluded() {
        let cfg = PackerConfig::default();
        let row = |cell, cov, inv, res| Row {
            instance: "x".into(),
            cell,
            n: 10,
            d: 3.0,
            pattern: "C3".into(),
            p: cfg.p,
            m: cfg.m,
            eps: cfg.epsilon,
            gamma: cfg.gamma,
            p1: 0.1,
            node_budget: 1,
            seed: 0,
            coverage: cov,
            rounds: 1,
            j_final: 0,
            aux_density: 0.0,
            witnesses: 1,
            wall_ms: 0,
            resample_ok: res,
            all_invariants_ok: inv,
            error: String::new(),
        };
        let cells = vec![cfg, PackerConfig { m: 4, ..cfg }, PackerConfig { m: 6, ..cfg }];
        let rows = vec![row(0, 0.9, true, false), row(1, 0.8, false, true), row(2, 0.5, true, true)];
        let s = summarise_cells(&rows, &cells);
        assert!(s[0].excluded.as_deref().unwrap().contains("resampling"));
        assert!(s[1].excluded.as_deref().unwrap().contains("invariants"));
        assert!(s[2].excluded.is_none());
    }

    #[test]
    fn thread_count_prefers_explicit() {
        assert_eq!(thread_count(Some(3)).unwrap(), 3);
        assert!(thread_count(Some(0)).is_err());
    }
}
