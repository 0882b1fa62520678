//! Experiment orchestration: scenario discovery, batch runs, sensitive-set
//! sampling, reports and plot data.

mod plot;
mod report;
mod sigma;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::border::{expand_sensitive, revised_frequent, SensitiveSet};
use crate::dataset::{parse_database, parse_itemset_file, write_database, TransactionDatabase};
use crate::error::{Error, Result};
use crate::hiding::{HidingOptions, HidingTask, Registry};
use crate::itemset::Itemset;
use crate::metrics::{evaluate, LossScope, MetricsReport};
use crate::miner::{mine_frequent, FrequentSet};

pub use plot::{emit_plot_data, Axis, XAxis};
pub use report::{write_csv_report, write_reports, write_text_report};
pub use sigma::Sigma;

/// One (dataset, threshold, sensitive set) combination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    /// `dataset/sigma/sensitive-file`.
    pub id: String,
    pub dataset_path: PathBuf,
    pub sensitive_path: PathBuf,
    pub sigma: Sigma,
}

impl Scenario {
    pub fn new(dataset_path: impl Into<PathBuf>, sensitive_path: impl Into<PathBuf>, sigma: Sigma) -> Self {
        let dataset_path = dataset_path.into();
        let sensitive_path = sensitive_path.into();
        let name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = dataset_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Scenario {
            id: format!("{stem}/{sigma}/{}", name(&sensitive_path)),
            dataset_path,
            sensitive_path,
            sigma,
        }
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    v.sort();
    Ok(v)
}

/// Walks `Datasets/<name>/<sigma>/<sensitive-file>` under `root` (or `root`
/// itself when it is the `Datasets` folder). The dataset file is the file
/// directly under `<name>` whose stem is `<name>`. Malformed entries are
/// skipped with a warning.
pub fn discover_scenarios(root: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "scenario root is not a directory"),
        ));
    }
    let datasets = if root.join("Datasets").is_dir() {
        root.join("Datasets")
    } else {
        root.to_path_buf()
    };
    let mut scenarios = Vec::new();
    for dir in sorted_entries(&datasets)?.into_iter().filter(|p| p.is_dir()) {
        let name = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let entries = sorted_entries(&dir)?;
        let Some(dataset) = entries
            .iter()
            .find(|p| p.is_file() && p.file_stem().is_some_and(|s| s.to_string_lossy() == name))
        else {
            warn!("skipping {}: no dataset file named {name}.<ext>", dir.display());
            continue;
        };
        for sigma_dir in entries.iter().filter(|p| p.is_dir()) {
            let label = sigma_dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let sigma: Sigma = match label.parse() {
                Ok(s) => s,
                Err(e) => {
                    warn!("skipping {}: {e}", sigma_dir.display());
                    continue;
                }
            };
            for hs in sorted_entries(sigma_dir)?.into_iter().filter(|p| p.is_file()) {
                let hs_name = hs.file_name().unwrap_or_default().to_string_lossy().into_owned();
                scenarios.push(Scenario {
                    id: format!("{name}/{label}/{hs_name}"),
                    dataset_path: dataset.clone(),
                    sensitive_path: hs,
                    sigma: sigma.clone(),
                });
            }
        }
    }
    Ok(scenarios)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub hiding: HidingOptions,
    pub loss_scope: LossScope,
    /// Write each sanitized database under `<dir>/sanitized/`.
    pub sanitized_dir: Option<PathBuf>,
    /// Worker threads; `None` uses one per core.
    pub jobs: Option<usize>,
    /// Recorded in the run configuration only.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            hiding: HidingOptions::default(),
            loss_scope: LossScope::Itemsets,
            sanitized_dir: None,
            jobs: Some(1),
            seed: None,
        }
    }
}

/// Resolved settings of a run, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithms: Vec<String>,
    pub scenarios: Vec<String>,
    pub solver_time_limit_secs: f64,
    pub solver_node_limit: Option<u64>,
    pub exact_border: bool,
    pub loss_scope: LossScope,
    pub seed: Option<u64>,
}

/// Facts about a scenario shared by all its runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub dataset: String,
    pub n_transactions: usize,
    pub sigma_min: u32,
    pub n_sensitive: usize,
    pub n_frequent: usize,
    pub n_revised: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub scenario_id: String,
    pub algorithm_id: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SanitizedOutput {
    pub scenario_id: String,
    pub algorithm_id: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub scenarios: Vec<ScenarioSummary>,
    pub reports: Vec<MetricsReport>,
    pub failures: Vec<Failure>,
    pub sanitized_outputs: Vec<SanitizedOutput>,
    pub run_config: RunConfig,
}

impl ReportBundle {
    /// Every requested run finished and hid its sensitive itemsets.
    pub fn all_hidden(&self) -> bool {
        self.failures.is_empty() && self.reports.iter().all(|r| r.hidden_ok)
    }

    pub fn report(&self, scenario_id: &str, algorithm_id: &str) -> Option<&MetricsReport> {
        self.reports
            .iter()
            .find(|r| r.scenario_id == scenario_id && r.algorithm_id == algorithm_id)
    }
}

/// Per-scenario work shared by every algorithm.
pub struct Prepared {
    pub scenario: Scenario,
    pub db: TransactionDatabase,
    pub sensitive: SensitiveSet,
    pub sigma_min: u32,
    pub frequent: FrequentSet,
    pub revised: FrequentSet,
}

impl Prepared {
    pub fn load(scenario: &Scenario) -> Result<Self> {
        let db = parse_database(&scenario.dataset_path)?;
        let sensitive = SensitiveSet::new(parse_itemset_file(&scenario.sensitive_path)?);
        let sigma_min = scenario.sigma.resolve(db.len());
        Self::from_parts(scenario.clone(), db, sensitive, sigma_min)
    }

    pub fn from_parts(
        scenario: Scenario,
        db: TransactionDatabase,
        sensitive: SensitiveSet,
        sigma_min: u32,
    ) -> Result<Self> {
        let frequent = mine_frequent(&db, sigma_min)?;
        for s in sensitive.infrequent_members(&frequent) {
            warn!("{}: sensitive itemset {{{s}}} is not frequent at {sigma_min}", scenario.id);
        }
        let closure = expand_sensitive(&frequent, &sensitive);
        let revised = revised_frequent(&frequent, &closure)?;
        Ok(Prepared {
            scenario,
            db,
            sensitive,
            sigma_min,
            frequent,
            revised,
        })
    }

    pub fn summary(&self) -> ScenarioSummary {
        ScenarioSummary {
            id: self.scenario.id.clone(),
            dataset: self
                .scenario
                .dataset_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            n_transactions: self.db.len(),
            sigma_min: self.sigma_min,
            n_sensitive: self.sensitive.len(),
            n_frequent: self.frequent.len(),
            n_revised: self.revised.len(),
        }
    }

    pub fn task(&self) -> HidingTask<'_> {
        HidingTask {
            db: &self.db,
            sensitive: &self.sensitive,
            sigma_min: self.sigma_min,
            frequent: &self.frequent,
        }
    }
}

fn sanitized_path(dir: &Path, scenario: &Scenario, algorithm: &str) -> PathBuf {
    let ext = scenario
        .dataset_path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dat".into());
    let folder: String = scenario
        .id
        .chars()
        .map(|c| if c == '/' || c == '\\' { '_' } else { c })
        .collect();
    dir.join("sanitized").join(folder).join(format!("{algorithm}.{ext}"))
}

/// Runs every algorithm on every scenario. A failing run becomes a
/// [`Failure`] and never affects the other runs.
pub fn run_experiment(
    scenarios: &[Scenario],
    registry: &Registry,
    algorithm_ids: &[String],
    options: &RunOptions,
) -> Result<ReportBundle> {
    for id in algorithm_ids {
        registry.get(id)?;
    }
    let run_config = RunConfig {
        algorithms: algorithm_ids.to_vec(),
        scenarios: scenarios.iter().map(|s| s.id.clone()).collect(),
        solver_time_limit_secs: options.hiding.budget.time_limit.as_secs_f64(),
        solver_node_limit: options.hiding.budget.node_limit,
        exact_border: options.hiding.exact_border,
        loss_scope: options.loss_scope,
        seed: options.seed,
    };
    let mut bundle = ReportBundle {
        scenarios: Vec::new(),
        reports: Vec::new(),
        failures: Vec::new(),
        sanitized_outputs: Vec::new(),
        run_config,
    };
    if algorithm_ids.is_empty() {
        return Ok(bundle);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;

    pool.install(|| {
        for scenario in scenarios {
            info!("scenario {}", scenario.id);
            let prepared = match Prepared::load(scenario) {
                Ok(p) => p,
                Err(e) => {
                    warn!("scenario {} failed: {e}", scenario.id);
                    for a in algorithm_ids {
                        bundle.failures.push(Failure {
                            scenario_id: scenario.id.clone(),
                            algorithm_id: a.clone(),
                            message: format!("scenario failed: {e}"),
                        });
                    }
                    continue;
                }
            };
            bundle.scenarios.push(prepared.summary());
            let outcomes: Vec<Result<(MetricsReport, Option<PathBuf>)>> = algorithm_ids
                .par_iter()
                .map(|id| run_one(&prepared, registry, id, options))
                .collect();
            for (id, outcome) in algorithm_ids.iter().zip(outcomes) {
                match outcome {
                    Ok((report, path)) => {
                        if let Some(path) = path {
                            bundle.sanitized_outputs.push(SanitizedOutput {
                                scenario_id: scenario.id.clone(),
                                algorithm_id: id.clone(),
                                path,
                            });
                        }
                        bundle.reports.push(report);
                    }
                    Err(e) => {
                        warn!("{} on {} failed: {e}", id, scenario.id);
                        bundle.failures.push(Failure {
                            scenario_id: scenario.id.clone(),
                            algorithm_id: id.clone(),
                            message: e.to_string(),
                        });
                    }
                }
            }
        }
    });
    Ok(bundle)
}

fn run_one(
    prepared: &Prepared,
    registry: &Registry,
    id: &str,
    options: &RunOptions,
) -> Result<(MetricsReport, Option<PathBuf>)> {
    let mut hiding = options.hiding.clone();
    if let Some(dir) = &hiding.dump_lp_dir {
        let folder: String = prepared.scenario.id.chars().map(|c| if c == '/' { '_' } else { c }).collect();
        hiding.dump_lp_dir = Some(dir.join(folder));
    }
    let result = registry.hide(id, &prepared.task(), &hiding)?;
    let report = evaluate(
        &result,
        &prepared.frequent,
        &prepared.revised,
        prepared.sigma_min,
        &prepared.scenario.id,
        options.loss_scope,
    )?;
    let path = match &options.sanitized_dir {
        Some(dir) => {
            let path = sanitized_path(dir, &prepared.scenario, id);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            write_database(&result.sanitized, &path)?;
            Some(path)
        }
        None => None,
    };
    Ok((report, path))
}

/// `k` distinct frequent itemsets of length at least 2, drawn uniformly with
/// a generator seeded by `seed`, in canonical order.
pub fn sample_sensitive(db: &TransactionDatabase, sigma_min: u32, k: usize, seed: u64) -> Result<Vec<Itemset>> {
    let frequent = mine_frequent(db, sigma_min)?;
    sample_from(&frequent, k, seed)
}

/// [`sample_sensitive`] over an already mined frequent set.
pub fn sample_from(frequent: &FrequentSet, k: usize, seed: u64) -> Result<Vec<Itemset>> {
    let eligible: Vec<&Itemset> = frequent.itemsets().filter(|x| x.len() >= 2).collect();
    if k > eligible.len() {
        return Err(Error::InsufficientItemsets {
            requested: k,
            available: eligible.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<Itemset> = rand::seq::index::sample(&mut rng, eligible.len(), k)
        .into_iter()
        .map(|i| eligible[i].clone())
        .collect();
    picked.sort();
    Ok(picked)
}

/// Number of runs per algorithm that failed or left something visible.
pub fn failures_by_algorithm(bundle: &ReportBundle) -> BTreeMap<String, usize> {
    let mut out: BTreeMap<String, usize> = BTreeMap::new();
    for r in bundle.reports.iter().filter(|r| !r.hidden_ok) {
        *out.entry(r.algorithm_id.clone()).or_default() += 1;
    }
    for f in &bundle.failures {
        *out.entry(f.algorithm_id.clone()).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests;
