//! Hiding algorithms, the shared sanitization step and plan application.

mod border_based;
mod external;
mod ilp_based;
mod registry;
mod sanitize;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use log::info;

use crate::border::{expand_sensitive, positive_border, revised_frequent, SensitiveSet};
use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::ilp::SolverBudget;
use crate::itemset::{Item, Itemset, Tid};
use crate::miner::{mine_frequent, support, FrequentSet};

pub use border_based::{MaxMin, Wba};
pub use external::ExternalAlgorithm;
pub use ilp_based::{CostScheme, Inline, MaxAccuracy};
pub use registry::{default_extensions_dir, Registry};
pub use sanitize::{greedy_victim_count, sanitize_transactions};

/// A single deletion: remove `item` from transaction `tid`.
pub type Deletion = (Tid, Item);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SanitizationPlan {
    /// Deletions in the order the algorithm chose them.
    pub deletions: Vec<Deletion>,
    pub algorithm_id: String,
    pub wall_time: Duration,
}

impl SanitizationPlan {
    pub fn len(&self) -> usize {
        self.deletions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deletions.is_empty()
    }

    /// Deletions sorted by tid then item.
    pub fn sorted(&self) -> Vec<Deletion> {
        let mut d = self.deletions.clone();
        d.sort_unstable();
        d
    }

    /// Distinct transactions touched.
    pub fn transactions(&self) -> Vec<Tid> {
        let mut t: Vec<Tid> = self.deletions.iter().map(|&(t, _)| t).collect();
        t.sort_unstable();
        t.dedup();
        t
    }
}

#[derive(Clone, Debug)]
pub struct HidingResult {
    pub plan: SanitizationPlan,
    pub sanitized: TransactionDatabase,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgorithmKind {
    BorderHeuristic,
    Ilp,
    Hybrid,
    External,
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmKind::BorderHeuristic => "border-heuristic",
            AlgorithmKind::Ilp => "ilp",
            AlgorithmKind::Hybrid => "hybrid",
            AlgorithmKind::External => "external",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgorithmDescriptor {
    pub id: String,
    pub kind: AlgorithmKind,
    pub params: BTreeMap<String, String>,
}

impl AlgorithmDescriptor {
    pub fn new(id: impl Into<String>, kind: AlgorithmKind) -> Self {
        AlgorithmDescriptor {
            id: id.into(),
            kind,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct HidingOptions {
    /// Budget per ILP algorithm run.
    pub budget: SolverBudget,
    /// Inline: exact conjunctive border rows instead of the surrogate.
    pub exact_border: bool,
    /// Write every ILP model built to `<dir>/<algorithm>.lp`.
    pub dump_lp_dir: Option<PathBuf>,
}


/// Inputs of one hiding run. `frequent` is mined from `db` at `sigma_min`
/// beforehand and shared between algorithms.
#[derive(Clone, Copy, Debug)]
pub struct HidingTask<'a> {
    pub db: &'a TransactionDatabase,
    pub sensitive: &'a SensitiveSet,
    pub sigma_min: u32,
    pub frequent: &'a FrequentSet,
}

/// What an algorithm hands back: its deletions and any diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub deletions: Vec<Deletion>,
    pub notes: Vec<String>,
}

/// Everything an algorithm may read. Derived sets are computed on first use
/// so their cost lands inside the timed run.
pub struct Context<'a> {
    pub db: &'a TransactionDatabase,
    pub sigma_min: u32,
    pub frequent: &'a FrequentSet,
    /// Sensitive itemsets frequent in `db`.
    pub sensitive: SensitiveSet,
    pub options: &'a HidingOptions,
    pub algorithm_id: &'a str,
    revised: OnceLock<FrequentSet>,
    border: OnceLock<Vec<(Itemset, u32)>>,
}

impl<'a> Context<'a> {
    /// Frequent sensitive itemsets with their supports, in hiding order:
    /// ascending support, ties lexicographic.
    pub fn hiding_order(&self) -> Vec<(Itemset, u32)> {
        let mut order: Vec<(Itemset, u32)> = self
            .sensitive
            .itemsets()
            .iter()
            .map(|s| (s.clone(), self.frequent.support(s).unwrap_or_else(|| support(self.db, s))))
            .collect();
        order.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        order
    }

    /// The revised frequent set `F - SS`.
    pub fn revised(&self) -> &FrequentSet {
        self.revised.get_or_init(|| {
            let closure = expand_sensitive(self.frequent, &self.sensitive);
            revised_frequent(self.frequent, &closure).expect("closure is drawn from F")
        })
    }

    /// Positive border of the revised set with original supports, in border
    /// order.
    pub fn positive_border(&self) -> &[(Itemset, u32)] {
        self.border.get_or_init(|| {
            let revised = self.revised();
            positive_border(revised)
                .into_iter()
                .map(|x| {
                    let s = revised.support(&x).expect("border is drawn from the revised set");
                    (x, s)
                })
                .collect()
        })
    }

    pub(crate) fn dump_lp(&self, model: &crate::ilp::LinearModel) -> Result<()> {
        let Some(dir) = &self.options.dump_lp_dir else {
            return Ok(());
        };
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(format!("{}.lp", self.algorithm_id));
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = std::io::BufWriter::new(file);
        model.write_lp(&mut out).map_err(|e| Error::io(&path, e))?;
        std::io::Write::flush(&mut out).map_err(|e| Error::io(&path, e))
    }
}

pub trait HidingAlgorithm: Send + Sync {
    fn descriptor(&self) -> &AlgorithmDescriptor;

    /// Computes deletions for `ctx.sensitive`, which is non-empty and holds
    /// only itemsets frequent in `ctx.db`.
    fn run(&self, ctx: &Context<'_>) -> Result<Outcome>;
}

/// Runs `algorithm`, applies its plan and checks that every sensitive
/// itemset ends below `sigma_min`. The measured wall time covers everything
/// except mining `task.frequent`.
pub fn hide(
    algorithm: &dyn HidingAlgorithm,
    task: &HidingTask<'_>,
    options: &HidingOptions,
) -> Result<HidingResult> {
    let desc = algorithm.descriptor();
    if task.sigma_min < 1 {
        return Err(Error::InvalidArgument("sigma_min must be at least 1".into()));
    }
    if task.frequent.sigma_min() != task.sigma_min {
        return Err(Error::InvalidArgument(format!(
            "frequent set was mined at {} but hiding runs at {}",
            task.frequent.sigma_min(),
            task.sigma_min
        )));
    }
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut active = Vec::new();
    for s in task.sensitive.itemsets() {
        let sup = task.frequent.support(s).unwrap_or_else(|| support(task.db, s));
        if sup < task.sigma_min {
            notes.push(format!(
                "sensitive itemset {{{s}}} already hidden (support {sup} < {})",
                task.sigma_min
            ));
        } else {
            active.push(s.clone());
        }
    }
    let outcome = if active.is_empty() {
        if task.sensitive.is_empty() {
            notes.push("no sensitive itemsets; nothing to hide".into());
        }
        Outcome::default()
    } else {
        let ctx = Context {
            db: task.db,
            sigma_min: task.sigma_min,
            frequent: task.frequent,
            sensitive: SensitiveSet::new(active),
            options,
            algorithm_id: &desc.id,
            revised: OnceLock::new(),
            border: OnceLock::new(),
        };
        algorithm.run(&ctx)?
    };
    notes.extend(outcome.notes);
    let sanitized = apply_plan(task.db, &outcome.deletions)?;
    let wall_time = start.elapsed();
    for s in task.sensitive.itemsets() {
        let left = support(&sanitized, s);
        if left >= task.sigma_min {
            return Err(match desc.kind {
                AlgorithmKind::External => Error::ExternalAlgorithm {
                    id: desc.id.clone(),
                    message: format!(
                        "plan leaves sensitive itemset {{{s}}} at support {left} >= {}",
                        task.sigma_min
                    ),
                },
                _ => Error::HidingIncomplete {
                    id: desc.id.clone(),
                    itemset: s.to_string(),
                    support: left,
                    sigma_min: task.sigma_min,
                },
            });
        }
    }
    info!(
        "{}: {} deletions in {:.3}s",
        desc.id,
        outcome.deletions.len(),
        wall_time.as_secs_f64()
    );
    Ok(HidingResult {
        plan: SanitizationPlan {
            deletions: outcome.deletions,
            algorithm_id: desc.id.clone(),
            wall_time,
        },
        sanitized,
        notes,
    })
}

/// Mines the frequent set and runs [`hide`].
pub fn hide_simple(
    algorithm: &dyn HidingAlgorithm,
    db: &TransactionDatabase,
    sensitive: &SensitiveSet,
    sigma_min: u32,
    options: &HidingOptions,
) -> Result<HidingResult> {
    let frequent = mine_frequent(db, sigma_min)?;
    hide(
        algorithm,
        &HidingTask {
            db,
            sensitive,
            sigma_min,
            frequent: &frequent,
        },
        options,
    )
}

/// New database with the listed cells removed.
pub fn apply_plan(db: &TransactionDatabase, deletions: &[Deletion]) -> Result<TransactionDatabase> {
    let mut seen = HashSet::with_capacity(deletions.len());
    let mut rows = db.raw_transactions().to_vec();
    for &(tid, item) in deletions {
        if !seen.insert((tid, item)) {
            return Err(Error::PlanValidity(format!("duplicate deletion ({tid}, {item})")));
        }
        let row = tid
            .checked_sub(1)
            .and_then(|p| rows.get_mut(p as usize))
            .ok_or_else(|| Error::PlanValidity(format!("transaction {tid} does not exist")))?;
        match row.binary_search(&item) {
            Ok(k) => {
                row.remove(k);
            }
            Err(_) => {
                return Err(Error::PlanValidity(format!(
                    "item {item} is not in transaction {tid}"
                )))
            }
        }
    }
    Ok(TransactionDatabase::from_canonical(rows))
}
