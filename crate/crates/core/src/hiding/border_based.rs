use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use super::{AlgorithmDescriptor, AlgorithmKind, Context, HidingAlgorithm, Outcome};
use crate::error::Result;
use crate::itemset::{is_sorted_subset, Item, Itemset};

/// Mutable view of the database during a greedy run, with the current
/// supports of the positive border.
struct Working<'c> {
    rows: Vec<Vec<Item>>,
    border: &'c [(Itemset, u32)],
    current: Vec<u32>,
    /// Border itemsets containing each item.
    by_item: HashMap<Item, Vec<usize>>,
    deletions: Vec<(u32, Item)>,
}

impl<'c> Working<'c> {
    fn new(ctx: &'c Context<'_>) -> Self {
        let border = ctx.positive_border();
        let pool = ctx.sensitive.item_pool();
        let mut by_item: HashMap<Item, Vec<usize>> = HashMap::new();
        for (b, (x, _)) in border.iter().enumerate() {
            for &i in x.items() {
                if pool.binary_search(&i).is_ok() {
                    by_item.entry(i).or_default().push(b);
                }
            }
        }
        Working {
            rows: ctx.db.raw_transactions().to_vec(),
            border,
            current: border.iter().map(|&(_, s)| s).collect(),
            by_item,
            deletions: Vec::new(),
        }
    }

    fn border_with(&self, item: Item) -> &[usize] {
        self.by_item.get(&item).map_or(&[], Vec::as_slice)
    }

    /// Positions of transactions currently containing `s`, ascending.
    fn supporters(&self, ctx: &Context<'_>, s: &Itemset) -> Vec<usize> {
        ctx.db
            .supporting_positions(s)
            .iter()
            .map(|p| p as usize)
            .filter(|&p| s.is_subset_of_slice(&self.rows[p]))
            .collect()
    }

    fn delete(&mut self, pos: usize, item: Item) {
        let row = &self.rows[pos];
        for &b in self.by_item.get(&item).map_or(&[][..], Vec::as_slice) {
            if self.border[b].0.is_subset_of_slice(row) {
                self.current[b] -= 1;
            }
        }
        let row = &mut self.rows[pos];
        let k = row.binary_search(&item).expect("deleted item is present");
        row.remove(k);
        self.deletions.push((pos as u32 + 1, item));
    }
}

/// The max-min family: hide one sensitive itemset at a time, deleting the
/// item whose least supported border itemset is best supported.
pub struct MaxMin {
    descriptor: AlgorithmDescriptor,
    border_sparing: bool,
}

impl MaxMin {
    /// Victim transaction: the smallest tid.
    pub fn first() -> Self {
        MaxMin {
            descriptor: AlgorithmDescriptor::new("max-min-1", AlgorithmKind::BorderHeuristic)
                .with_param("victim", "smallest-tid"),
            border_sparing: false,
        }
    }

    /// Victim transaction: the smallest tid not supporting a weakest border
    /// itemset of the chosen item, else the smallest tid.
    pub fn second() -> Self {
        MaxMin {
            descriptor: AlgorithmDescriptor::new("max-min-2", AlgorithmKind::BorderHeuristic)
                .with_param("victim", "border-sparing"),
            border_sparing: true,
        }
    }
}

impl HidingAlgorithm for MaxMin {
    fn descriptor(&self) -> &AlgorithmDescriptor {
        &self.descriptor
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Outcome> {
        let mut w = Working::new(ctx);
        for (s, _) in ctx.hiding_order() {
            let mut supporters = w.supporters(ctx, &s);
            while supporters.len() >= ctx.sigma_min as usize {
                // None ranks above every finite minimum.
                let weakest = |i: Item| w.border_with(i).iter().map(|&b| w.current[b]).min();
                let mut item = s[0];
                let mut best = weakest(item);
                for &i in &s.items()[1..] {
                    let m = weakest(i);
                    if better_min(m, best) {
                        item = i;
                        best = m;
                    }
                }
                let mut victim = 0;
                if self.border_sparing {
                    if let Some(m) = best {
                        let weak: Vec<&Itemset> = w
                            .border_with(item)
                            .iter()
                            .filter(|&&b| w.current[b] == m)
                            .map(|&b| &w.border[b].0)
                            .collect();
                        victim = supporters
                            .iter()
                            .position(|&p| !weak.iter().any(|x| x.is_subset_of_slice(&w.rows[p])))
                            .unwrap_or(0);
                    }
                }
                let pos = supporters.remove(victim);
                w.delete(pos, item);
            }
        }
        Ok(Outcome {
            deletions: w.deletions,
            notes: Vec::new(),
        })
    }
}

/// `true` when `m` beats `best` under max-min, with no border itemset
/// counting as infinitely supported.
fn better_min(m: Option<u32>, best: Option<u32>) -> bool {
    match (m, best) {
        (None, Some(_)) => true,
        (Some(a), Some(b)) => a > b,
        _ => false,
    }
}

/// Weighted border approach: repeatedly make the deletion that damages the
/// least border weight, with each border itemset weighted by its support.
pub struct Wba {
    descriptor: AlgorithmDescriptor,
}

impl Wba {
    pub fn new() -> Self {
        Wba {
            descriptor: AlgorithmDescriptor::new("wba", AlgorithmKind::BorderHeuristic)
                .with_param("weight", "support"),
        }
    }
}

impl Default for Wba {
    fn default() -> Self {
        Self::new()
    }
}

impl HidingAlgorithm for Wba {
    fn descriptor(&self) -> &AlgorithmDescriptor {
        &self.descriptor
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Outcome> {
        let mut w = Working::new(ctx);
        let order = ctx.hiding_order();
        let sigma = ctx.sigma_min as usize;
        let mut supporters: Vec<Vec<usize>> = order.iter().map(|(s, _)| w.supporters(ctx, s)).collect();
        let mut open: Vec<bool> = supporters.iter().map(|sup| sup.len() >= sigma).collect();
        let mut with_item: HashMap<Item, Vec<usize>> = HashMap::new();
        for (k, (s, _)) in order.iter().enumerate() {
            for &i in s.items() {
                with_item.entry(i).or_default().push(k);
            }
        }
        // Every (position, item) that would shrink an open sensitive
        // itemset, keyed as (damage, Reverse(open itemsets hit), position,
        // item); the smallest key is the next deletion.
        let mut queue: BTreeSet<Key> = BTreeSet::new();
        let mut keys: HashMap<(usize, Item), Key> = HashMap::new();
        let refresh = |w: &Working<'_>,
                       open: &[bool],
                       queue: &mut BTreeSet<Key>,
                       keys: &mut HashMap<(usize, Item), Key>,
                       p: usize,
                       i: Item| {
            if let Some(old) = keys.remove(&(p, i)) {
                queue.remove(&old);
            }
            let row = &w.rows[p];
            if row.binary_search(&i).is_err() {
                return;
            }
            let hits = with_item
                .get(&i)
                .map_or(0, |ks| ks.iter().filter(|&&k| open[k] && order[k].0.is_subset_of_slice(row)).count());
            if hits == 0 {
                return;
            }
            let cost: u64 = w
                .border_with(i)
                .iter()
                .filter(|&&b| is_sorted_subset(w.border[b].0.items(), row))
                .map(|&b| u64::from(w.border[b].1))
                .sum();
            let key = (cost, Reverse(hits), p, i);
            queue.insert(key);
            keys.insert((p, i), key);
        };
        for (k, sup) in supporters.iter().enumerate() {
            if open[k] {
                for &p in sup {
                    for &i in order[k].0.items() {
                        if !keys.contains_key(&(p, i)) {
                            refresh(&w, &open, &mut queue, &mut keys, p, i);
                        }
                    }
                }
            }
        }
        while let Some(&(_, _, pos, item)) = queue.first() {
            let touched: Vec<Item> = w.rows[pos].clone();
            w.delete(pos, item);
            let mut closed = Vec::new();
            for &k in with_item.get(&item).map_or(&[][..], Vec::as_slice) {
                let sup = &mut supporters[k];
                if let Ok(at) = sup.binary_search(&pos) {
                    sup.remove(at);
                    if open[k] && sup.len() < sigma {
                        open[k] = false;
                        closed.push(k);
                    }
                }
            }
            for i in touched {
                if with_item.contains_key(&i) {
                    refresh(&w, &open, &mut queue, &mut keys, pos, i);
                }
            }
            for k in closed {
                for &p in &supporters[k] {
                    for &i in order[k].0.items() {
                        refresh(&w, &open, &mut queue, &mut keys, p, i);
                    }
                }
            }
        }
        debug_assert!(open.iter().all(|&o| !o));
        Ok(Outcome {
            deletions: w.deletions,
            notes: Vec::new(),
        })
    }
}

type Key = (u64, Reverse<usize>, usize, Item);

/// Full rescan per step; the reference the queue-driven version must match.
#[cfg(test)]
pub(crate) fn wba_by_rescan(ctx: &Context<'_>) -> Vec<(u32, Item)> {
    let mut w = Working::new(ctx);
    let order = ctx.hiding_order();
    let sigma = ctx.sigma_min as usize;
    let mut supporters: Vec<Vec<usize>> = order.iter().map(|(s, _)| w.supporters(ctx, s)).collect();
    loop {
        let open: Vec<usize> = (0..order.len()).filter(|&k| supporters[k].len() >= sigma).collect();
        if open.is_empty() {
            return w.deletions;
        }
        let mut best: Option<Key> = None;
        for &k in &open {
            for &p in &supporters[k] {
                for &i in order[k].0.items() {
                    let row = &w.rows[p];
                    let cost: u64 = w
                        .border_with(i)
                        .iter()
                        .filter(|&&b| is_sorted_subset(w.border[b].0.items(), row))
                        .map(|&b| u64::from(w.border[b].1))
                        .sum();
                    let hits = open
                        .iter()
                        .filter(|&&j| order[j].0.contains(i) && order[j].0.is_subset_of_slice(row))
                        .count();
                    let key = (cost, Reverse(hits), p, i);
                    if best.as_ref().is_none_or(|b| key < *b) {
                        best = Some(key);
                    }
                }
            }
        }
        let (_, _, pos, item) = best.expect("open itemsets have supporters");
        w.delete(pos, item);
        for (k, sup) in supporters.iter_mut().enumerate() {
            if order[k].0.contains(item) {
                sup.retain(|&p| p != pos);
            }
        }
    }
}
