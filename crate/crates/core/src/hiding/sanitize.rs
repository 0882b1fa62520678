use std::collections::BTreeMap;

use super::Deletion;
use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset, Tid};

/// Greedy hitting set over the sensitive itemsets contained in `row`: the
/// items to delete, in deletion order.
fn greedy_hits(row: &[Item], sensitive: &[Itemset]) -> Vec<Item> {
    let mut contained: Vec<&Itemset> =
        sensitive.iter().filter(|s| s.is_subset_of_slice(row)).collect();
    let mut victims = Vec::new();
    while !contained.is_empty() {
        let mut counts: BTreeMap<Item, usize> = BTreeMap::new();
        for s in &contained {
            for &i in s.items() {
                *counts.entry(i).or_default() += 1;
            }
        }
        // Highest count; the BTreeMap order makes the smallest item win ties.
        let (&item, _) = counts
            .iter()
            .rev()
            .max_by_key(|&(_, &c)| c)
            .expect("contained itemsets are non-empty");
        victims.push(item);
        contained.retain(|s| !s.contains(item));
    }
    victims
}

/// Deletions that leave each listed transaction supporting no sensitive
/// itemset. Per transaction, repeatedly deletes the item occurring in the
/// most still-contained sensitive itemsets.
pub fn sanitize_transactions(
    db: &TransactionDatabase,
    tids: &[Tid],
    sensitive: &[Itemset],
) -> Result<Vec<Deletion>> {
    let mut plan = Vec::new();
    for &t in tids {
        let row = db
            .transaction(t)
            .ok_or_else(|| Error::InvalidArgument(format!("transaction {t} does not exist")))?;
        plan.extend(greedy_hits(row, sensitive).into_iter().map(|i| (t, i)));
    }
    Ok(plan)
}

/// Number of deletions [`sanitize_transactions`] would make in `row`.
pub fn greedy_victim_count(row: &[Item], sensitive: &[Itemset]) -> usize {
    greedy_hits(row, sensitive).len()
}
