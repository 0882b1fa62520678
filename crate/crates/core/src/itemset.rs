//! Items, transaction identifiers and canonical itemsets.

use std::fmt;

/// An opaque item label, as found in FIMI-style transaction files.
pub type Item = u32;

/// A 1-based transaction identifier (the line number in the source file).
pub type Tid = u32;

/// A non-empty set of items stored as a strictly ascending array.
///
/// Ordering is lexicographic on the item arrays, which is the canonical
/// candidate order used throughout mining and border computation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Itemset(Vec<Item>);

impl Itemset {
    /// Builds an itemset from arbitrary items, sorting and deduplicating them.
    ///
    /// Returns `None` for an empty input.
    pub fn new(items: impl IntoIterator<Item = Item>) -> Option<Self> {
        let mut items: Vec<Item> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        if items.is_empty() {
            None
        } else {
            Some(Itemset(items))
        }
    }

    /// Wraps items that are already strictly ascending and non-empty.
    pub(crate) fn from_sorted(items: Vec<Item>) -> Self {
        debug_assert!(!items.is_empty());
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Itemset(items)
    }

    pub fn singleton(item: Item) -> Self {
        Itemset(vec![item])
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: Item) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    /// `true` if every item of `self` occurs in the sorted slice `other`.
    pub fn is_subset_of_slice(&self, other: &[Item]) -> bool {
        is_sorted_subset(&self.0, other)
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    /// All subsets with exactly one item removed, in lexicographic order.
    pub fn immediate_subsets(&self) -> impl Iterator<Item = Itemset> + '_ {
        let n = self.0.len();
        (0..n).rev().filter(move |_| n > 1).map(move |skip| {
            let items = self
                .0
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x)
                .collect();
            Itemset(items)
        })
    }

    /// Order used when iterating borders: longer itemsets first, then
    /// lexicographic.
    pub fn border_order(a: &Itemset, b: &Itemset) -> std::cmp::Ordering {
        b.len().cmp(&a.len()).then_with(|| a.cmp(b))
    }

    pub fn into_items(self) -> Vec<Item> {
        self.0
    }
}

impl fmt::Debug for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for Itemset {
    type Output = Item;

    fn index(&self, index: usize) -> &Item {
        &self.0[index]
    }
}

/// Merge-based subset test on two ascending slices.
pub fn is_sorted_subset(small: &[Item], large: &[Item]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut j = 0;
    for &x in small {
        while j < large.len() && large[j] < x {
            j += 1;
        }
        if j == large.len() || large[j] != x {
            return false;
        }
        j += 1;
    }
    true
}
