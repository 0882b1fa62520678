//! Frequent itemset hiding.
//!
//! Given a transaction database, a minimum support threshold and a set of
//! sensitive itemsets, the algorithms in [`hiding`] delete items from
//! selected transactions until no sensitive itemset can be mined at that
//! threshold, while trying to keep every other frequent itemset frequent.
//! [`metrics`] scores the result and [`harness`] runs whole experiments.

pub mod border;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod hiding;
pub mod ilp;
pub mod itemset;
pub mod metrics;
pub mod miner;
pub mod tidset;

#[cfg(test)]
pub(crate) mod testutil;

pub use border::{
    expand_sensitive, negative_border, positive_border, revised_frequent, BorderSet, SensitiveSet,
};
pub use dataset::{
    db_stats, parse_database, parse_itemset_file, write_database, write_itemset_file,
    DatasetStats, Delimiter, TransactionDatabase,
};
pub use error::{Error, Result};
pub use itemset::{Item, Itemset, Tid};
pub use miner::{mine_frequent, support, support_map, FrequentSet};
pub use harness::{
    discover_scenarios, emit_plot_data, run_experiment, sample_sensitive, Axis, ReportBundle,
    RunOptions, Scenario, Sigma, XAxis,
};
pub use hiding::{
    apply_plan, hide, sanitize_transactions, AlgorithmDescriptor, AlgorithmKind, HidingAlgorithm,
    HidingOptions, HidingResult, HidingTask, Registry, SanitizationPlan,
};
pub use ilp::{solve_ilp, solve_lp, LinearModel, Solution, SolveStatus, SolverBudget};
pub use metrics::{evaluate, information_loss, raw_changes, side_effects, LossScope, MetricsReport};
