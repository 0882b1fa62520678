//! Data-quality and efficiency measures of a hiding run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::hiding::{HidingResult, SanitizationPlan};
use crate::itemset::Itemset;
use crate::miner::{mine_frequent, support_map, FrequentSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub algorithm_id: String,
    pub scenario_id: String,
    pub raw_changes: usize,
    pub side_effects: usize,
    /// Fraction in `[0, 1]`.
    pub information_loss: f64,
    /// Seconds, millisecond resolution.
    pub cpu_time: f64,
    pub hidden_ok: bool,
    pub notes: Vec<String>,
}

/// Which itemsets the information loss sums over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossScope {
    /// Every itemset of the revised frequent set.
    #[default]
    Itemsets,
    /// Only its single items.
    Items,
}

/// Supports in `db` of every itemset in `xs`, reusing `known` where present.
fn supports_in(
    db: &TransactionDatabase,
    xs: &[&Itemset],
    known: Option<&FrequentSet>,
) -> BTreeMap<Itemset, u32> {
    let missing: Vec<Itemset> = xs
        .iter()
        .filter(|x| known.is_none_or(|k| !k.contains(x)))
        .map(|&x| x.clone())
        .collect();
    let mut out = support_map(db, &missing);
    if let Some(k) = known {
        for x in xs {
            if let Some(s) = k.support(x) {
                out.insert((*x).clone(), s);
            }
        }
    }
    out
}

fn loss(
    revised: &FrequentSet,
    sanitized: &TransactionDatabase,
    scope: LossScope,
    known: Option<&FrequentSet>,
) -> f64 {
    let xs: Vec<&Itemset> = revised
        .itemsets()
        .filter(|x| scope == LossScope::Itemsets || x.len() == 1)
        .collect();
    if xs.is_empty() {
        return 0.0;
    }
    let after = supports_in(sanitized, &xs, known);
    let (mut num, mut den) = (0u64, 0u64);
    for x in xs {
        let before = revised.support(x).expect("iterating the revised set");
        num += u64::from(before.abs_diff(after[x]));
        den += u64::from(before);
    }
    num as f64 / den as f64
}

/// Summed absolute support error over the revised frequent set, relative to
/// its summed original supports. Zero for an empty revised set.
pub fn information_loss(revised: &FrequentSet, sanitized: &TransactionDatabase) -> f64 {
    loss(revised, sanitized, LossScope::Itemsets, None)
}

/// [`information_loss`] restricted to single items.
pub fn item_information_loss(revised: &FrequentSet, sanitized: &TransactionDatabase) -> f64 {
    loss(revised, sanitized, LossScope::Items, None)
}

/// Non-sensitive frequent itemsets lost: `|revised| - |after|`.
pub fn side_effects(revised: &FrequentSet, after: &FrequentSet) -> Result<usize> {
    revised.len().checked_sub(after.len()).ok_or_else(|| {
        Error::Integrity(format!(
            "sanitized database has {} frequent itemsets, more than the {} expected",
            after.len(),
            revised.len()
        ))
    })
}

pub fn raw_changes(plan: &SanitizationPlan) -> usize {
    plan.deletions.len()
}

/// Seconds rounded to whole milliseconds.
pub fn seconds_ms(d: std::time::Duration) -> f64 {
    d.as_millis() as f64 / 1000.0
}

/// Scores `result` against the original frequent set and the revised set
/// `revised = F - SS`, both mined from the original database at
/// `sigma_min`.
pub fn evaluate(
    result: &HidingResult,
    frequent: &FrequentSet,
    revised: &FrequentSet,
    sigma_min: u32,
    scenario_id: &str,
    scope: LossScope,
) -> Result<MetricsReport> {
    let after = mine_frequent(&result.sanitized, sigma_min)?;
    // Hidden when no itemset of F - revised survives.
    let hidden_ok = frequent
        .itemsets()
        .filter(|x| !revised.contains(x))
        .all(|x| !after.contains(x));
    let within_revised = after.itemsets().all(|x| revised.contains(x));
    let side_effects = if within_revised {
        side_effects(revised, &after)?
    } else if !hidden_ok {
        // The count difference would credit surviving sensitive itemsets;
        // report the revised itemsets actually lost instead.
        revised.itemsets().filter(|x| !after.contains(x)).count()
    } else {
        return Err(Error::Integrity(
            "sanitized database has frequent itemsets the original lacks".into(),
        ));
    };
    let information_loss = loss(revised, &result.sanitized, scope, Some(&after));
    Ok(MetricsReport {
        algorithm_id: result.plan.algorithm_id.clone(),
        scenario_id: scenario_id.to_owned(),
        raw_changes: raw_changes(&result.plan),
        side_effects,
        information_loss,
        cpu_time: seconds_ms(result.plan.wall_time),
        hidden_ok,
        notes: result.notes.clone(),
    })
}
