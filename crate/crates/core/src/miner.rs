//! Support counting and level-wise (Apriori) frequent itemset mining.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset};
use crate::tidset::{self, TidSet};

/// Frequent itemsets with their absolute support counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequentSet {
    entries: BTreeMap<Itemset, u32>,
    sigma_min: u32,
}

impl FrequentSet {
    pub fn new(entries: BTreeMap<Itemset, u32>, sigma_min: u32) -> Self {
        FrequentSet { entries, sigma_min }
    }

    pub fn empty(sigma_min: u32) -> Self {
        Self::new(BTreeMap::new(), sigma_min)
    }

    pub fn sigma_min(&self) -> u32 {
        self.sigma_min
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, itemset: &Itemset) -> bool {
        self.entries.contains_key(itemset)
    }

    pub fn support(&self, itemset: &Itemset) -> Option<u32> {
        self.entries.get(itemset).copied()
    }

    /// Entries in lexicographic itemset order.
    pub fn iter(&self) -> impl Iterator<Item = (&Itemset, u32)> + '_ {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn itemsets(&self) -> impl Iterator<Item = &Itemset> + '_ {
        self.entries.keys()
    }

    pub fn entries(&self) -> &BTreeMap<Itemset, u32> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<Itemset, u32> {
        self.entries
    }

    /// Distinct items occurring in any entry, ascending.
    pub fn items(&self) -> Vec<Item> {
        let mut items: Vec<Item> = self
            .entries
            .keys()
            .filter(|s| s.len() == 1)
            .map(|s| s[0])
            .collect();
        items.sort_unstable();
        items
    }

    /// Entries grouped by itemset length (`result[k - 1]` holds the
    /// k-itemsets), each group in lexicographic order.
    pub fn by_length(&self) -> Vec<Vec<&Itemset>> {
        let mut levels: Vec<Vec<&Itemset>> = Vec::new();
        for s in self.entries.keys() {
            if levels.len() < s.len() {
                levels.resize_with(s.len(), Vec::new);
            }
            levels[s.len() - 1].push(s);
        }
        levels
    }
}

/// Number of transactions containing every item of `itemset`.
pub fn support(db: &TransactionDatabase, itemset: &Itemset) -> u32 {
    let mut sets = Vec::with_capacity(itemset.len());
    for item in itemset.items() {
        match db.tidset(*item) {
            Some(s) => sets.push(s),
            None => return 0,
        }
    }
    tidset::intersection_count(&mut sets, db.len()) as u32
}

/// Supports of a batch of itemsets; duplicates collapse.
pub fn support_map(db: &TransactionDatabase, itemsets: &[Itemset]) -> BTreeMap<Itemset, u32> {
    let unique: Vec<&Itemset> = itemsets
        .iter()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    unique
        .par_iter()
        .map(|s| ((*s).clone(), support(db, s)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// All itemsets with support at least `sigma_min`, mined level by level.
///
/// Candidates of length k are joined from (k-1)-itemsets sharing a (k-2)
/// prefix and pruned unless every (k-1)-subset is frequent. Supports come
/// from intersecting the parents' tid-sets; only one level of tid-sets is
/// held at a time.
pub fn mine_frequent(db: &TransactionDatabase, sigma_min: u32) -> Result<FrequentSet> {
    if sigma_min < 1 {
        return Err(Error::InvalidArgument(
            "minimum support must be at least 1".into(),
        ));
    }
    let n = db.len();
    let mut entries = BTreeMap::new();
    let mut level: Vec<(Itemset, TidSet)> = db
        .index()
        .iter()
        .filter(|(_, set)| set.len() >= sigma_min as usize)
        .map(|(&item, set)| (Itemset::singleton(item), set.clone()))
        .collect();

    while !level.is_empty() {
        for (s, set) in &level {
            entries.insert(s.clone(), set.len() as u32);
        }
        if level[0].0.len() == 1 {
            level = frequent_pairs(db, &level, sigma_min);
            continue;
        }
        let members: HashSet<&[Item]> = level.iter().map(|(s, _)| s.items()).collect();
        let k = level[0].0.len();
        let groups = prefix_groups(&level, k);
        let next: Vec<Vec<(Itemset, TidSet)>> = groups
            .par_iter()
            .map(|range| {
                let mut out = Vec::new();
                let group = &level[range.clone()];
                for (i, (a, ta)) in group.iter().enumerate() {
                    for (b, tb) in &group[i + 1..] {
                        let mut items = a.items().to_vec();
                        items.push(b[k - 1]);
                        let candidate = Itemset::from_sorted(items);
                        if !all_subsets_present(&candidate, &members) {
                            continue;
                        }
                        if ta.intersection_len(tb) < sigma_min as usize {
                            continue;
                        }
                        out.push((candidate, ta.intersect(tb, n)));
                    }
                }
                out
            })
            .collect();
        level = next.into_iter().flatten().collect();
    }
    Ok(FrequentSet::new(entries, sigma_min))
}

/// Length-2 level counted by scanning transactions instead of joining every
/// pair of frequent singletons. `singles` is sorted by item.
fn frequent_pairs(
    db: &TransactionDatabase,
    singles: &[(Itemset, TidSet)],
    sigma_min: u32,
) -> Vec<(Itemset, TidSet)> {
    let n = db.len();
    let rank: HashMap<Item, usize> = singles
        .iter()
        .enumerate()
        .map(|(r, (s, _))| (s.items()[0], r))
        .collect();
    let rows = db.raw_transactions();
    singles
        .par_iter()
        .map_init(
            || vec![0u32; singles.len()],
            |counts, (a, ta)| {
                let mut touched = Vec::new();
                let ia = a.items()[0];
                for pos in ta.iter() {
                    let row = &rows[pos as usize];
                    for b in &row[row.partition_point(|&x| x <= ia)..] {
                        if let Some(&rb) = rank.get(b) {
                            if counts[rb] == 0 {
                                touched.push(rb);
                            }
                            counts[rb] += 1;
                        }
                    }
                }
                touched.sort_unstable();
                let mut out = Vec::new();
                for rb in touched {
                    if counts[rb] >= sigma_min {
                        let (b, tb) = &singles[rb];
                        let pair = Itemset::from_sorted(vec![a.items()[0], b.items()[0]]);
                        out.push((pair, ta.intersect(tb, n)));
                    }
                    counts[rb] = 0;
                }
                out
            },
        )
        .flatten()
        .collect()
}

/// Ranges of a lexicographically sorted level that share the first `k - 1`
/// items.
pub(crate) fn prefix_groups<T>(level: &[(Itemset, T)], k: usize) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=level.len() {
        if i == level.len() || level[i].0.items()[..k - 1] != level[start].0.items()[..k - 1] {
            if i - start > 1 {
                groups.push(start..i);
            }
            start = i;
        }
    }
    groups
}

/// Apriori prune: the two subsets obtained by dropping one of the last two
/// items are the join parents, so only the others need checking.
pub(crate) fn all_subsets_present(candidate: &Itemset, members: &HashSet<&[Item]>) -> bool {
    let k = candidate.len();
    if k <= 2 {
        return true;
    }
    let items = candidate.items();
    let mut buf = Vec::with_capacity(k - 1);
    (0..k - 2).all(|skip| {
        buf.clear();
        buf.extend(
            items
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x),
        );
        members.contains(buf.as_slice())
    })
}
