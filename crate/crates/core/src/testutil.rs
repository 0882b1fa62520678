//! Shared fixtures and brute-force oracles for unit tests.

use std::collections::BTreeMap;

use crate::dataset::TransactionDatabase;
use crate::itemset::{Item, Itemset};

/// The six-transaction toy database over items a=1, b=2, c=3:
/// {a,b,c} {a,b} {a,c} {b,c} {a,b,c} {c}.
pub fn d_toy() -> TransactionDatabase {
    TransactionDatabase::from_transactions(vec![
        vec![1, 2, 3],
        vec![1, 2],
        vec![1, 3],
        vec![2, 3],
        vec![1, 2, 3],
        vec![3],
    ])
}

pub fn is(items: &[Item]) -> Itemset {
    Itemset::new(items.iter().copied()).unwrap()
}

/// Support by scanning every transaction.
pub fn naive_support(db: &TransactionDatabase, x: &Itemset) -> u32 {
    db.transactions()
        .filter(|(_, t)| x.items().iter().all(|i| t.contains(i)))
        .count() as u32
}

/// Support by scanning raw rows.
pub fn naive_support_rows(rows: &[Vec<Item>], x: &Itemset) -> u32 {
    rows.iter()
        .filter(|t| x.items().iter().all(|i| t.contains(i)))
        .count() as u32
}

/// Every non-empty subset of `universe`.
pub fn powerset(universe: &[Item]) -> Vec<Itemset> {
    assert!(universe.len() <= 16);
    (1u32..(1 << universe.len()))
        .map(|mask| {
            Itemset::new(
                universe
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &x)| x),
            )
            .unwrap()
        })
        .collect()
}

/// Frequent itemsets by enumerating the powerset of the item universe.
pub fn naive_frequent(db: &TransactionDatabase, sigma: u32) -> BTreeMap<Itemset, u32> {
    powerset(&db.item_universe())
        .into_iter()
        .map(|x| {
            let c = naive_support(db, &x);
            (x, c)
        })
        .filter(|&(_, c)| c >= sigma)
        .collect()
}
