use std::collections::BTreeMap;

use log::warn;

use super::model::{LinearModel, Relation, RowTag, VarTag};
use crate::border::SensitiveSet;
use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset, Tid};
use crate::miner::support;

/// Sensitive itemsets that are frequent at `sigma_min`, with their supports.
/// The rest are returned separately.
fn split_sensitive(
    db: &TransactionDatabase,
    sensitive: &SensitiveSet,
    sigma_min: u32,
) -> (Vec<(Itemset, u32)>, Vec<Itemset>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for s in sensitive.itemsets() {
        let sup = support(db, s);
        if sup >= sigma_min {
            kept.push((s.clone(), sup));
        } else {
            warn!("sensitive itemset {{{s}}} has support {sup} < {sigma_min}; already hidden");
            dropped.push(s.clone());
        }
    }
    (kept, dropped)
}

/// Transaction-selection model: `x_t = 1` sanitizes transaction `t`.
#[derive(Clone, Debug)]
pub struct TransactionModel {
    pub model: LinearModel,
    /// Tid of each variable, ascending.
    pub tids: Vec<Tid>,
    /// Sensitive itemsets with one hiding row each, in row order.
    pub hidden: Vec<Itemset>,
    /// Sensitive itemsets already below the threshold.
    pub dropped: Vec<Itemset>,
}

impl TransactionModel {
    /// Tids whose variable is 1 in `values`.
    pub fn selected(&self, values: &[f64]) -> Vec<Tid> {
        self.tids
            .iter()
            .zip(values)
            .filter(|(_, &x)| x > 0.5)
            .map(|(&t, _)| t)
            .collect()
    }
}

pub fn build_transaction_model(
    db: &TransactionDatabase,
    sensitive: &SensitiveSet,
    sigma_min: u32,
    costs: impl Fn(Tid) -> f64,
) -> Result<TransactionModel> {
    let (kept, dropped) = split_sensitive(db, sensitive, sigma_min);
    if kept.is_empty() {
        return Err(Error::NothingToHide);
    }
    let supporters: Vec<Vec<Tid>> = kept.iter().map(|(s, _)| db.supporting_tids(s)).collect();
    let mut var_of: BTreeMap<Tid, usize> = supporters.iter().flatten().map(|&t| (t, 0)).collect();
    let mut model = LinearModel::new();
    let mut tids = Vec::with_capacity(var_of.len());
    for (&t, var) in var_of.iter_mut() {
        *var = model.add_binary(costs(t), VarTag::Transaction(t));
        tids.push(t);
    }
    for (k, ((_, sup), sup_tids)) in kept.iter().zip(&supporters).enumerate() {
        let terms = sup_tids.iter().map(|t| (var_of[t], 1.0)).collect();
        model.add_constraint(
            terms,
            Relation::Ge,
            f64::from(sup - sigma_min + 1),
            RowTag::Hiding(k),
        );
    }
    Ok(TransactionModel {
        model,
        tids,
        hidden: kept.into_iter().map(|(s, _)| s).collect(),
        dropped,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CellModelOptions {
    /// Encode border protection exactly with one loss indicator per
    /// (supporting transaction, border itemset) instead of the cell-count
    /// surrogate.
    pub exact_border: bool,
}

/// A protection row for one border itemset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderRow {
    pub row: usize,
    pub itemset: Itemset,
    /// `support - sigma_min`: how many supporters the itemset can lose.
    pub slack: u32,
}

/// Cell-deletion model: `u_{t,i} = 1` deletes item `i` from transaction `t`.
#[derive(Clone, Debug)]
pub struct CellModel {
    pub model: LinearModel,
    /// Cell of each `u` variable; these are variables `0..cells.len()`,
    /// ordered by tid then item.
    pub cells: Vec<(Tid, Item)>,
    pub hidden: Vec<Itemset>,
    pub dropped: Vec<Itemset>,
    pub border_rows: Vec<BorderRow>,
}

impl CellModel {
    pub fn selected(&self, values: &[f64]) -> Vec<(Tid, Item)> {
        self.cells
            .iter()
            .zip(values)
            .filter(|(_, &x)| x > 0.5)
            .map(|(&c, _)| c)
            .collect()
    }

    /// Assignment for the cell model given a set of deleted cells, with the
    /// auxiliary variables set to their tightest consistent values.
    pub fn assignment(&self, deleted: &[(Tid, Item)]) -> Vec<f64> {
        let mut values = vec![0.0; self.model.n_vars()];
        for cell in deleted {
            if let Ok(k) = self.cells.binary_search(cell) {
                values[k] = 1.0;
            }
        }
        for row in &self.model.constraints {
            match row.tag {
                // z + sum(u) >= 1; z is the first term.
                RowTag::Link(..) => {
                    let z = row.terms[0].0;
                    let covered: f64 = row.terms[1..].iter().map(|&(v, _)| values[v]).sum();
                    values[z] = if covered >= 1.0 { 0.0 } else { 1.0 };
                }
                // w - u >= 0; w is the first term.
                RowTag::LossLink(..) => {
                    let w = row.terms[0].0;
                    if values[row.terms[1].0] > 0.5 {
                        values[w] = 1.0;
                    }
                }
                _ => {}
            }
        }
        values
    }

    /// Copy of the model without the given border rows.
    pub fn without_rows(&self, rows: &[usize]) -> LinearModel {
        let mut model = self.model.clone();
        let mut k = 0;
        model.constraints.retain(|_| {
            let keep = !rows.contains(&k);
            k += 1;
            keep
        });
        model
    }
}

pub fn build_cell_model(
    db: &TransactionDatabase,
    sensitive: &SensitiveSet,
    border_pos: &[Itemset],
    sigma_min: u32,
    options: CellModelOptions,
) -> Result<CellModel> {
    let (kept, dropped) = split_sensitive(db, sensitive, sigma_min);
    if kept.is_empty() {
        return Err(Error::NothingToHide);
    }
    let supporters: Vec<Vec<Tid>> = kept.iter().map(|(s, _)| db.supporting_tids(s)).collect();
    let mut cell_var: BTreeMap<(Tid, Item), usize> = BTreeMap::new();
    for ((s, _), sup_tids) in kept.iter().zip(&supporters) {
        for &t in sup_tids {
            for &i in s.items() {
                cell_var.insert((t, i), 0);
            }
        }
    }
    let mut model = LinearModel::new();
    let mut cells = Vec::with_capacity(cell_var.len());
    for (&(t, i), var) in cell_var.iter_mut() {
        *var = model.add_binary(1.0, VarTag::Cell(t, i));
        cells.push((t, i));
    }

    for (k, ((s, _), sup_tids)) in kept.iter().zip(&supporters).enumerate() {
        let mut survivors = Vec::with_capacity(sup_tids.len());
        for &t in sup_tids {
            let z = model.add_binary(0.0, VarTag::Survives(t, k));
            let mut terms = vec![(z, 1.0)];
            terms.extend(s.items().iter().map(|&i| (cell_var[&(t, i)], 1.0)));
            model.add_constraint(terms, Relation::Ge, 1.0, RowTag::Link(t, k));
            survivors.push((z, 1.0));
        }
        model.add_constraint(
            survivors,
            Relation::Le,
            f64::from(sigma_min - 1),
            RowTag::Hiding(k),
        );
    }

    let mut border_rows = Vec::new();
    for (b, x) in border_pos.iter().enumerate() {
        let sup_tids = db.supporting_tids(x);
        let sup = sup_tids.len() as u32;
        if sup < sigma_min {
            warn!("border itemset {{{x}}} is not frequent; no protection row");
            continue;
        }
        let slack = sup - sigma_min;
        if options.exact_border {
            let mut losses = Vec::new();
            for &t in &sup_tids {
                let touched: Vec<usize> = x
                    .items()
                    .iter()
                    .filter_map(|&i| cell_var.get(&(t, i)).copied())
                    .collect();
                if touched.is_empty() {
                    continue;
                }
                let w = model.add_binary(0.0, VarTag::Loses(t, b));
                for u in touched {
                    model.add_constraint(
                        vec![(w, 1.0), (u, -1.0)],
                        Relation::Ge,
                        0.0,
                        RowTag::LossLink(t, b),
                    );
                }
                losses.push((w, 1.0));
            }
            if losses.is_empty() {
                continue;
            }
            let row = model.add_constraint(losses, Relation::Le, f64::from(slack), RowTag::Border(b));
            border_rows.push(BorderRow {
                row,
                itemset: x.clone(),
                slack,
            });
        } else {
            let terms: Vec<(usize, f64)> = sup_tids
                .iter()
                .flat_map(|&t| x.items().iter().map(move |&i| (t, i)))
                .filter_map(|cell| cell_var.get(&cell).map(|&u| (u, 1.0)))
                .collect();
            if terms.is_empty() {
                continue;
            }
            let row = model.add_constraint(terms, Relation::Le, f64::from(slack), RowTag::Border(b));
            border_rows.push(BorderRow {
                row,
                itemset: x.clone(),
                slack,
            });
        }
    }

    Ok(CellModel {
        model,
        cells,
        hidden: kept.into_iter().map(|(s, _)| s).collect(),
        dropped,
        border_rows,
    })
}

/// Removes rows identical to an earlier row up to the right-hand side,
/// keeping the tightest one. Returns the number of rows removed.
pub fn remove_duplicate_rows(model: &mut LinearModel) -> usize {
    use std::collections::HashMap;
    type Key = (Vec<(usize, u64)>, Relation);
    let mut first: HashMap<Key, usize> = HashMap::new();
    let mut drop = vec![false; model.constraints.len()];
    for k in 0..model.constraints.len() {
        let row = &model.constraints[k];
        if row.relation == Relation::Eq {
            continue;
        }
        let mut terms: Vec<(usize, u64)> = row.terms.iter().map(|&(v, c)| (v, c.to_bits())).collect();
        terms.sort_unstable();
        let key = (terms, row.relation);
        match first.get(&key) {
            None => {
                first.insert(key, k);
            }
            Some(&j) => {
                let rhs = row.rhs;
                let kept = &mut model.constraints[j];
                kept.rhs = match kept.relation {
                    Relation::Le => kept.rhs.min(rhs),
                    _ => kept.rhs.max(rhs),
                };
                drop[k] = true;
            }
        }
    }
    let mut k = 0;
    model.constraints.retain(|_| {
        let keep = !drop[k];
        k += 1;
        keep
    });
    drop.iter().filter(|&&d| d).count()
}
