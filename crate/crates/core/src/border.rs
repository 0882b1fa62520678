//! Sensitive closure, revised frequent set and its positive/negative borders.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset};
use crate::miner::FrequentSet;

/// The itemsets to hide, together with the pool of items they mention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SensitiveSet {
    itemsets: Vec<Itemset>,
    item_pool: Vec<Item>,
}

impl SensitiveSet {
    /// Duplicates are dropped, first occurrence kept.
    pub fn new(itemsets: impl IntoIterator<Item = Itemset>) -> Self {
        let mut seen = HashSet::new();
        let itemsets: Vec<Itemset> = itemsets
            .into_iter()
            .filter(|s| seen.insert(s.clone()))
            .collect();
        let item_pool: BTreeSet<Item> = itemsets
            .iter()
            .flat_map(|s| s.items().iter().copied())
            .collect();
        SensitiveSet {
            itemsets,
            item_pool: item_pool.into_iter().collect(),
        }
    }

    pub fn itemsets(&self) -> &[Itemset] {
        &self.itemsets
    }

    /// Distinct items occurring in any sensitive itemset, ascending.
    pub fn item_pool(&self) -> &[Item] {
        &self.item_pool
    }

    pub fn len(&self) -> usize {
        self.itemsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    /// Members that are not frequent in `frequent` (already hidden).
    pub fn infrequent_members(&self, frequent: &FrequentSet) -> Vec<Itemset> {
        self.itemsets
            .iter()
            .filter(|s| !frequent.contains(s))
            .cloned()
            .collect()
    }
}

/// Maximal and minimal-infrequent itemsets delimiting a downward-closed set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BorderSet {
    pub positive: Vec<Itemset>,
    pub negative: Vec<Itemset>,
}

impl BorderSet {
    pub fn compute(revised: &FrequentSet, universe: &[Item]) -> Self {
        BorderSet {
            positive: positive_border(revised),
            negative: negative_border(revised, universe),
        }
    }
}

/// Frequent itemsets that contain at least one sensitive itemset, in
/// lexicographic order.
pub fn expand_sensitive(frequent: &FrequentSet, sensitive: &SensitiveSet) -> Vec<Itemset> {
    if sensitive.is_empty() {
        return Vec::new();
    }
    frequent
        .itemsets()
        .filter(|x| sensitive.itemsets().iter().any(|s| s.is_subset_of(x)))
        .cloned()
        .collect()
}

/// `frequent` minus `closure`, keeping the original supports.
pub fn revised_frequent(frequent: &FrequentSet, closure: &[Itemset]) -> Result<FrequentSet> {
    let removed: HashSet<&Itemset> = closure.iter().collect();
    if let Some(missing) = removed.iter().find(|x| !frequent.contains(x)) {
        return Err(Error::InvalidArgument(format!(
            "itemset {missing} is not in the frequent set"
        )));
    }
    let entries = frequent
        .iter()
        .filter(|(x, _)| !removed.contains(x))
        .map(|(x, c)| (x.clone(), c))
        .collect();
    Ok(FrequentSet::new(entries, frequent.sigma_min()))
}

/// Maximal members of a downward-closed set, longest first then
/// lexicographic.
pub fn positive_border(revised: &FrequentSet) -> Vec<Itemset> {
    let mut covered: HashSet<Itemset> = HashSet::new();
    for x in revised.itemsets().filter(|x| x.len() > 1) {
        covered.extend(x.immediate_subsets());
    }
    let mut border: Vec<Itemset> = revised
        .itemsets()
        .filter(|x| !covered.contains(*x))
        .cloned()
        .collect();
    border.sort_by(Itemset::border_order);
    border
}

/// Minimal itemsets over `universe` outside a downward-closed set whose
/// proper non-empty subsets all belong to it, longest first then
/// lexicographic. Candidates come from joining same-prefix members level by
/// level; the powerset is never enumerated.
pub fn negative_border(revised: &FrequentSet, universe: &[Item]) -> Vec<Itemset> {
    let mut border: Vec<Itemset> = universe
        .iter()
        .map(|&i| Itemset::singleton(i))
        .filter(|s| !revised.contains(s))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let levels = revised.by_length();
    for level in &levels {
        let Some(first) = level.first() else { continue };
        let k = first.len();
        let members: HashSet<&[Item]> = level.iter().map(|s| s.items()).collect();
        for group in same_prefix_groups(level, k) {
            for (i, a) in group.iter().enumerate() {
                for b in &group[i + 1..] {
                    let mut items = a.items().to_vec();
                    items.push(b[k - 1]);
                    let candidate = Itemset::from_sorted(items);
                    if revised.contains(&candidate) {
                        continue;
                    }
                    if crate::miner::all_subsets_present(&candidate, &members) {
                        border.push(candidate);
                    }
                }
            }
        }
    }
    border.sort_by(Itemset::border_order);
    border
}

fn same_prefix_groups<'a>(level: &'a [&'a Itemset], k: usize) -> Vec<&'a [&'a Itemset]> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=level.len() {
        if i == level.len() || level[i].items()[..k - 1] != level[start].items()[..k - 1] {
            if i - start > 1 {
                groups.push(&level[start..i]);
            }
            start = i;
        }
    }
    groups
}
