//! Batch experiments: several seeded runs per (instance, configuration),
//! per-run CSV rows and best/average summaries.
//!
//! The "average" column is the mean over runs of each run's final
//! (best) weight. Run `r` uses seed `base_seed + r`. Time limits are
//! wall-clock.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::greedy::greedy_construct;
use crate::instance::{evaluate, Instance};
use crate::instgen::{generate, GenParams};
use crate::neighbours::NeighbourGraph;
use crate::vdls::{run_vdls, BranchPick, BranchPool, InitStrategy, SearchConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid bench spec: {0}")]
    Spec(String),
    #[error("{instance}: run with seed {seed} returned W={weight}, C={cost} but re-evaluation gives W={check_weight}, C={check_cost} (budget {budget})")]
    Infeasible {
        instance: String,
        seed: u64,
        weight: i64,
        cost: i64,
        check_weight: i64,
        check_cost: i64,
        budget: i64,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Vdls,
    Greedy,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::Vdls => "vdls",
            Algo::Greedy => "greedy",
        })
    }
}

/// One solver configuration of a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BenchConfig {
    #[serde(default = "default_algo")]
    pub algo: Algo,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_width")]
    pub width: usize,
    #[serde(default = "default_pool")]
    pub branch_pool: BranchPool,
    #[serde(default = "default_pick")]
    pub branch_pick: BranchPick,
    #[serde(default = "default_init")]
    pub init: InitStrategy,
}

fn default_algo() -> Algo {
    Algo::Vdls
}
fn default_depth() -> usize {
    8
}
fn default_width() -> usize {
    7
}
fn default_pool() -> BranchPool {
    BranchPool::Neighbours
}
fn default_pick() -> BranchPick {
    BranchPick::TopGain
}
fn default_init() -> InitStrategy {
    InitStrategy::Greedy
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algo: default_algo(),
            depth: default_depth(),
            width: default_width(),
            branch_pool: default_pool(),
            branch_pick: default_pick(),
            init: default_init(),
        }
    }
}

impl BenchConfig {
    pub fn search_config(&self, cutoff: Duration, seed: u64) -> SearchConfig {
        SearchConfig {
            max_depth: self.depth,
            max_width: self.width,
            cutoff,
            seed,
            branch_pool: self.branch_pool,
            branch_pick: self.branch_pick,
            init: self.init,
        }
    }
}

/// Cartesian product of configuration values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigGrid {
    #[serde(default = "grid_depths")]
    pub depths: Vec<usize>,
    #[serde(default = "grid_widths")]
    pub widths: Vec<usize>,
    #[serde(default = "grid_pools")]
    pub branch_pools: Vec<BranchPool>,
    #[serde(default = "grid_picks")]
    pub branch_picks: Vec<BranchPick>,
    #[serde(default = "grid_inits")]
    pub inits: Vec<InitStrategy>,
}

fn grid_depths() -> Vec<usize> {
    vec![default_depth()]
}
fn grid_widths() -> Vec<usize> {
    vec![default_width()]
}
fn grid_pools() -> Vec<BranchPool> {
    vec![default_pool()]
}
fn grid_picks() -> Vec<BranchPick> {
    vec![default_pick()]
}
fn grid_inits() -> Vec<InitStrategy> {
    vec![default_init()]
}

impl ConfigGrid {
    /// The depth 5..=10 by width 5..=10 parameter study.
    pub fn parameter_study() -> Self {
        ConfigGrid {
            depths: (5..=10).collect(),
            widths: (5..=10).collect(),
            branch_pools: grid_pools(),
            branch_picks: grid_picks(),
            inits: grid_inits(),
        }
    }

    pub fn expand(&self) -> Vec<BenchConfig> {
        let mut out = Vec::new();
        for &depth in &self.depths {
            for &width in &self.widths {
                for &branch_pool in &self.branch_pools {
                    for &branch_pick in &self.branch_picks {
                        for &init in &self.inits {
                            out.push(BenchConfig {
                                algo: Algo::Vdls,
                                depth,
                                width,
                                branch_pool,
                                branch_pick,
                                init,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    File {
        path: PathBuf,
    },
    Generated {
        generate: GenParams,
        #[serde(default)]
        name: Option<String>,
    },
}

impl InstanceSource {
    pub fn label(&self) -> String {
        match self {
            InstanceSource::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            InstanceSource::Generated { generate, name } => {
                name.clone().unwrap_or_else(|| generate.name())
            }
        }
    }

    fn load(&self, base_dir: Option<&Path>) -> Result<Instance, String> {
        match self {
            InstanceSource::File { path } => {
                let path = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                Instance::load(&path).map_err(|e| format!("{}: {e}", path.display()))
            }
            InstanceSource::Generated { generate: p, .. } => {
                generate(p).map_err(|e| e.to_string())
            }
        }
    }
}

/// Benchmark description, usually read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub instances: Vec<InstanceSource>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub cutoff_seconds: f64,
    #[serde(default)]
    pub configs: Vec<BenchConfig>,
    #[serde(default)]
    pub grid: Option<ConfigGrid>,
    #[serde(default)]
    pub base_seed: u64,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_runs() -> usize {
    10
}

impl BenchSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Explicit configs followed by the expanded grid; the default
    /// configuration when neither is given.
    pub fn all_configs(&self) -> Vec<BenchConfig> {
        let mut out = self.configs.clone();
        if let Some(grid) = &self.grid {
            out.extend(grid.expand());
        }
        if out.is_empty() {
            out.push(BenchConfig::default());
        }
        out
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::Spec("runs must be at least 1".into()));
        }
        if !(self.cutoff_seconds > 0.0 && self.cutoff_seconds.is_finite()) {
            return Err(HarnessError::Spec("cutoff_seconds must be positive".into()));
        }
        for c in self.all_configs() {
            if c.algo == Algo::Vdls {
                c.search_config(Duration::from_secs(1), 0)
                    .validate()
                    .map_err(HarnessError::Spec)?;
            }
        }
        Ok(())
    }
}

/// One CSV row per run. A failed instance produces rows with empty numeric
/// fields and `terminated_by = "error"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub instance: String,
    pub algo: Algo,
    pub d: usize,
    pub k: usize,
    pub branch_pool: BranchPool,
    pub branch_pick: BranchPick,
    pub init: InitStrategy,
    pub seed: u64,
    #[serde(rename = "W")]
    pub weight: Option<i64>,
    #[serde(rename = "C")]
    pub cost: Option<i64>,
    pub time_to_best: Option<f64>,
    pub terminated_by: String,
}

impl RunRow {
    pub fn config(&self) -> BenchConfig {
        BenchConfig {
            algo: self.algo,
            depth: self.d,
            width: self.k,
            branch_pool: self.branch_pool,
            branch_pick: self.branch_pick,
            init: self.init,
        }
    }

    pub fn is_error(&self) -> bool {
        self.weight.is_none()
    }
}

/// Best/average over the runs of one (instance, configuration) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: String,
    pub algo: Algo,
    pub d: usize,
    pub k: usize,
    pub branch_pool: BranchPool,
    pub branch_pick: BranchPick,
    pub init: InitStrategy,
    pub runs: usize,
    pub best: i64,
    pub average: f64,
    pub mean_time_to_best: f64,
}

impl SummaryRow {
    pub fn config(&self) -> BenchConfig {
        BenchConfig {
            algo: self.algo,
            depth: self.d,
            width: self.k,
            branch_pool: self.branch_pool,
            branch_pick: self.branch_pick,
            init: self.init,
        }
    }
}

/// Mean of the per-instance best values of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub algo: Algo,
    pub d: usize,
    pub k: usize,
    pub branch_pool: BranchPool,
    pub branch_pick: BranchPick,
    pub init: InitStrategy,
    pub instances: usize,
    pub mean_best: f64,
    pub mean_average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResults {
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
    pub errors: Vec<String>,
}

type ConfigKey = (Algo, usize, usize, BranchPool, BranchPick, InitStrategy);

fn key(c: &BenchConfig) -> ConfigKey {
    (c.algo, c.depth, c.width, c.branch_pool, c.branch_pick, c.init)
}

struct Loaded {
    label: String,
    instance: Result<Arc<(Instance, NeighbourGraph)>, String>,
}

/// Runs every (instance, configuration, run) triple and checks each result
/// against a from-scratch evaluation.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchResults, HarnessError> {
    run_bench_in(spec, None)
}

/// Like [`run_bench`], resolving relative instance paths against `base_dir`.
pub fn run_bench_in(spec: &BenchSpec, base_dir: Option<&Path>) -> Result<BenchResults, HarnessError> {
    spec.validate()?;
    let configs = spec.all_configs();
    let cutoff = Duration::from_secs_f64(spec.cutoff_seconds);

    let loaded: Vec<Loaded> = spec
        .instances
        .iter()
        .map(|src| Loaded {
            label: src.label(),
            instance: src.load(base_dir).map(|inst| {
                let graph = NeighbourGraph::build(&inst);
                Arc::new((inst, graph))
            }),
        })
        .collect();

    let mut tasks = Vec::new();
    for (li, _) in loaded.iter().enumerate() {
        for (ci, _) in configs.iter().enumerate() {
            for run in 0..spec.runs {
                tasks.push((li, ci, run));
            }
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if spec.jobs > 0 {
        pool = pool.num_threads(spec.jobs);
    }
    let pool = pool.build()?;
    let rows: Vec<Result<RunRow, HarnessError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(li, ci, run)| {
                execute(&loaded[li], &configs[ci], spec.base_seed + run as u64, cutoff)
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let errors = loaded
        .iter()
        .filter_map(|l| l.instance.as_ref().err().cloned())
        .collect();
    let summary = summarize(&rows);
    Ok(BenchResults {
        rows,
        summary,
        errors,
    })
}

fn execute(
    loaded: &Loaded,
    cfg: &BenchConfig,
    seed: u64,
    cutoff: Duration,
) -> Result<RunRow, HarnessError> {
    let mut row = RunRow {
        instance: loaded.label.clone(),
        algo: cfg.algo,
        d: cfg.depth,
        k: cfg.width,
        branch_pool: cfg.branch_pool,
        branch_pick: cfg.branch_pick,
        init: cfg.init,
        seed,
        weight: None,
        cost: None,
        time_to_best: None,
        terminated_by: "error".into(),
    };
    let Ok(shared) = &loaded.instance else {
        return Ok(row);
    };
    let (inst, graph) = &**shared;
    let (sol, time_to_best, terminated_by) = match cfg.algo {
        Algo::Greedy => {
            let start = Instant::now();
            let sol = greedy_construct(inst);
            (sol, start.elapsed().as_secs_f64(), "complete".to_string())
        }
        Algo::Vdls => {
            let (sol, report) = run_vdls(inst, graph, &cfg.search_config(cutoff, seed));
            (sol, report.time_to_best, report.terminated_by.to_string())
        }
    };
    let (check_weight, check_cost) = evaluate(inst, &sol.items());
    if check_weight != sol.weight() || check_cost != sol.cost() || check_cost > inst.budget() {
        return Err(HarnessError::Infeasible {
            instance: loaded.label.clone(),
            seed,
            weight: sol.weight(),
            cost: sol.cost(),
            check_weight,
            check_cost,
            budget: inst.budget(),
        });
    }
    row.weight = Some(check_weight);
    row.cost = Some(check_cost);
    row.time_to_best = Some(time_to_best);
    row.terminated_by = terminated_by;
    Ok(row)
}

/// Aggregates per-run rows into best/average rows, one per (instance,
/// configuration), in order of first appearance. Error rows are skipped.
pub fn summarize(rows: &[RunRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, ConfigKey)> = Vec::new();
    let mut groups: BTreeMap<(String, ConfigKey), Vec<&RunRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| !r.is_error()) {
        let k = (row.instance.clone(), key(&row.config()));
        let entry = groups.entry(k.clone()).or_default();
        if entry.is_empty() {
            order.push(k);
        }
        entry.push(row);
    }
    order
        .into_iter()
        .map(|k| {
            let group = &groups[&k];
            let weights: Vec<i64> = group.iter().filter_map(|r| r.weight).collect();
            let times: Vec<f64> = group.iter().filter_map(|r| r.time_to_best).collect();
            let first = group[0];
            SummaryRow {
                instance: first.instance.clone(),
                algo: first.algo,
                d: first.d,
                k: first.k,
                branch_pool: first.branch_pool,
                branch_pick: first.branch_pick,
                init: first.init,
                runs: weights.len(),
                best: weights.iter().copied().max().unwrap_or(0),
                average: weights.iter().sum::<i64>() as f64 / weights.len() as f64,
                mean_time_to_best: times.iter().sum::<f64>() / times.len() as f64,
            }
        })
        .collect()
}

/// Averages the summary rows of each configuration over instances.
pub fn summarize_configs(summary: &[SummaryRow]) -> Vec<ConfigSummary> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<ConfigKey, Vec<&SummaryRow>> = BTreeMap::new();
    for row in summary {
        let k = key(&row.config());
        let entry = groups.entry(k).or_default();
        if entry.is_empty() {
            order.push(k);
        }
        entry.push(row);
    }
    order
        .into_iter()
        .map(|k| {
            let group = &groups[&k];
            let count = group.len() as f64;
            let c = group[0].config();
            ConfigSummary {
                algo: c.algo,
                d: c.depth,
                k: c.width,
                branch_pool: c.branch_pool,
                branch_pick: c.branch_pick,
                init: c.init,
                instances: group.len(),
                mean_best: group.iter().map(|r| r.best as f64).sum::<f64>() / count,
                mean_average: group.iter().map(|r| r.average).sum::<f64>() / count,
            }
        })
        .collect()
}

/// A variant's mean best weight against the baseline's over the same
/// instances. `inverted` is set when the variant does strictly better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantComparison {
    pub variant: String,
    pub instances: usize,
    pub baseline_mean_best: f64,
    pub variant_mean_best: f64,
    pub inverted: bool,
}

pub fn config_label(c: &BenchConfig) -> String {
    format!(
        "{}(d={},k={},pool={},pick={},init={})",
        c.algo,
        c.depth,
        c.width,
        enum_name(&c.branch_pool),
        enum_name(&c.branch_pick),
        enum_name(&c.init)
    )
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// Compares every configuration with `baseline` on the instances both
/// completed.
pub fn compare_variants(summary: &[SummaryRow], baseline: &BenchConfig) -> Vec<VariantComparison> {
    let base: BTreeMap<&str, i64> = summary
        .iter()
        .filter(|r| key(&r.config()) == key(baseline))
        .map(|r| (r.instance.as_str(), r.best))
        .collect();
    let mut variants: Vec<BenchConfig> = Vec::new();
    for r in summary {
        let c = r.config();
        if key(&c) != key(baseline) && !variants.iter().any(|v| key(v) == key(&c)) {
            variants.push(c);
        }
    }
    variants
        .into_iter()
        .map(|v| {
            let pairs: Vec<(i64, i64)> = summary
                .iter()
                .filter(|r| key(&r.config()) == key(&v))
                .filter_map(|r| base.get(r.instance.as_str()).map(|&b| (b, r.best)))
                .collect();
            let count = pairs.len().max(1) as f64;
            let baseline_mean_best = pairs.iter().map(|p| p.0 as f64).sum::<f64>() / count;
            let variant_mean_best = pairs.iter().map(|p| p.1 as f64).sum::<f64>() / count;
            VariantComparison {
                variant: config_label(&v),
                instances: pairs.len(),
                baseline_mean_best,
                variant_mean_best,
                inverted: variant_mean_best > baseline_mean_best,
            }
        })
        .collect()
}

pub fn write_rows_csv<W: Write>(out: W, rows: &[RunRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "instance",
            "algo",
            "d",
            "k",
            "branch_pool",
            "branch_pick",
            "init",
            "seed",
            "W",
            "C",
            "time_to_best",
            "terminated_by",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, summary: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in summary {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: std::io::Read>(input: R) -> Result<Vec<RunRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Path of the summary file that accompanies a per-run CSV:
/// `results.csv` -> `results.summary.csv`.
pub fn summary_path(rows_path: &Path) -> PathBuf {
    let stem = rows_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    rows_path.with_file_name(format!("{stem}.summary.csv"))
}

/// Writes the per-run CSV to `path` and the summary next to it.
pub fn write_results(path: &Path, results: &BenchResults) -> Result<PathBuf, HarnessError> {
    write_rows_csv(std::fs::File::create(path)?, &results.rows)?;
    let summary = summary_path(path);
    write_summary_csv(std::fs::File::create(&summary)?, &results.summary)?;
    Ok(summary)
}
