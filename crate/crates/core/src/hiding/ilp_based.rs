use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use super::{sanitize_transactions, AlgorithmDescriptor, AlgorithmKind, Context, HidingAlgorithm, Outcome};
use super::sanitize::greedy_victim_count;
use crate::error::{Error, Result};
use crate::ilp::{
    build_cell_model, build_transaction_model, solve_ilp, CellModel, CellModelOptions,
    SolveStatus, SolverBudget, SolverError,
};
use crate::itemset::{Item, Itemset, Tid};
use crate::miner::FrequentSet;

/// Objective coefficient of each candidate transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostScheme {
    /// Every transaction costs 1: minimize sanitized transactions.
    Unit,
    /// 1 + number of revised frequent itemsets the transaction supports.
    RevisedSupport,
    /// Deletions the greedy sanitizer would make in the transaction.
    GreedyVictims,
}

/// Transaction selection by ILP followed by greedy sanitization.
pub struct MaxAccuracy {
    descriptor: AlgorithmDescriptor,
    costs: CostScheme,
}

impl MaxAccuracy {
    pub fn new(id: &str, costs: CostScheme) -> Self {
        let name = match costs {
            CostScheme::Unit => "unit",
            CostScheme::RevisedSupport => "revised-support",
            CostScheme::GreedyVictims => "greedy-victims",
        };
        MaxAccuracy {
            descriptor: AlgorithmDescriptor::new(id, AlgorithmKind::Ilp).with_param("cost", name),
            costs,
        }
    }

    pub fn plain() -> Self {
        Self::new("max-accuracy", CostScheme::Unit)
    }

    pub fn coefficient_based() -> Self {
        Self::new("coeff-max-accuracy", CostScheme::RevisedSupport)
    }

    pub fn heuristic_coefficients() -> Self {
        Self::new("heuristic-coeff", CostScheme::GreedyVictims)
    }
}

/// Number of members of the downward-closed `revised` contained in `row`.
fn revised_members_in(revised: &FrequentSet, row: &[Item]) -> u64 {
    fn walk(revised: &FrequentSet, row: &[Item], prefix: &mut Vec<Item>, from: usize) -> u64 {
        let mut n = 0;
        for j in from..row.len() {
            prefix.push(row[j]);
            if revised.contains(&Itemset::from_sorted(prefix.clone())) {
                n += 1 + walk(revised, row, prefix, j + 1);
            }
            prefix.pop();
        }
        n
    }
    walk(revised, row, &mut Vec::new(), 0)
}

impl HidingAlgorithm for MaxAccuracy {
    fn descriptor(&self) -> &AlgorithmDescriptor {
        &self.descriptor
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Outcome> {
        let sensitive = ctx.sensitive.itemsets();
        let row = |t: Tid| ctx.db.transaction(t).expect("candidate tids come from the database");
        let cost = |t: Tid| -> f64 {
            match self.costs {
                CostScheme::Unit => 1.0,
                CostScheme::RevisedSupport => 1.0 + revised_members_in(ctx.revised(), row(t)) as f64,
                CostScheme::GreedyVictims => greedy_victim_count(row(t), sensitive) as f64,
            }
        };
        let mut tm = build_transaction_model(ctx.db, &ctx.sensitive, ctx.sigma_min, cost)?;

        // Cheapest supporters per row; the union covers every row.
        let mut hint = vec![0.0; tm.tids.len()];
        for c in &tm.model.constraints {
            let mut vars: Vec<usize> = c.terms.iter().map(|&(v, _)| v).collect();
            vars.sort_by(|&a, &b| tm.model.objective[a].total_cmp(&tm.model.objective[b]).then(a.cmp(&b)));
            for &v in vars.iter().take(c.rhs as usize) {
                hint[v] = 1.0;
            }
        }
        tm.model.warm_start = Some(hint);
        ctx.dump_lp(&tm.model)?;

        let mut notes = Vec::new();
        let sol = solve_ilp(&tm.model, ctx.options.budget)?;
        match sol.status {
            SolveStatus::Optimal => {}
            SolveStatus::TimeoutIncumbent => notes.push(format!(
                "solver budget expired after {} nodes; best selection has cost {} (relaxation bound {:.3})",
                sol.stats.nodes, sol.objective_value, sol.stats.root_bound
            )),
            SolveStatus::Infeasible => {
                return Err(Error::Integrity("transaction selection model is infeasible".into()))
            }
        }
        let tids = tm.selected(&sol.values);
        let deletions = sanitize_transactions(ctx.db, &tids, sensitive)?;
        Ok(Outcome { deletions, notes })
    }
}

/// Cell-level ILP that protects the positive border of the revised set.
pub struct Inline {
    descriptor: AlgorithmDescriptor,
}

impl Inline {
    pub fn new() -> Self {
        Inline {
            descriptor: AlgorithmDescriptor::new("inline", AlgorithmKind::Hybrid),
        }
    }
}

impl Default for Inline {
    fn default() -> Self {
        Self::new()
    }
}

/// Greedy cell deletions hiding every sensitive itemset while overdrawing as
/// few border rows as possible. Returns the deletions and the usage of each
/// border row.
fn greedy_cells(
    ctx: &Context<'_>,
    cm: &CellModel,
    exact: bool,
    relaxed: &[usize],
) -> (Vec<(Tid, Item)>, Vec<u32>) {
    let rows = &cm.border_rows;
    let supp: Vec<Vec<Tid>> = rows.iter().map(|r| ctx.db.supporting_tids(&r.itemset)).collect();
    let mut by_item: HashMap<Item, Vec<usize>> = HashMap::new();
    for (b, r) in rows.iter().enumerate() {
        if relaxed.contains(&r.row) {
            continue;
        }
        for &i in r.itemset.items() {
            by_item.entry(i).or_default().push(b);
        }
    }
    let mut usage = vec![0u32; rows.len()];
    // Exact encoding: transactions already counted as lost per row.
    let mut lost: HashSet<(usize, Tid)> = HashSet::new();
    let mut removed: Vec<(Tid, Item)> = Vec::new();
    let mut removed_set: HashSet<(Tid, Item)> = HashSet::new();

    for (s, _) in ctx.hiding_order() {
        let supporters: Vec<Tid> = ctx
            .db
            .supporting_tids(&s)
            .into_iter()
            .filter(|&t| !s.items().iter().any(|&i| removed_set.contains(&(t, i))))
            .collect();
        let key = |usage: &[u32], lost: &HashSet<(usize, Tid)>, t: Tid, i: Item| {
            let (mut broken, mut delta) = (0usize, 0u32);
            for &b in by_item.get(&i).map_or(&[][..], Vec::as_slice) {
                if supp[b].binary_search(&t).is_err() || (exact && lost.contains(&(b, t))) {
                    continue;
                }
                delta += 1;
                if usage[b] + 1 > rows[b].slack {
                    broken += 1;
                }
            }
            (broken, delta, t, i)
        };
        // Keys of the remaining supporters never decrease while `s` is being
        // hidden, so stale heap entries are lower bounds.
        let mut heap: BinaryHeap<Reverse<(usize, u32, Tid, Item)>> = supporters
            .iter()
            .flat_map(|&t| s.items().iter().map(move |&i| (t, i)))
            .map(|(t, i)| Reverse(key(&usage, &lost, t, i)))
            .collect();
        let mut done: HashSet<Tid> = HashSet::new();
        let mut live = supporters.len();
        while live >= ctx.sigma_min as usize {
            let Reverse(stale) = heap.pop().expect("supporters are non-empty");
            let (_, _, t, i) = stale;
            if done.contains(&t) {
                continue;
            }
            let fresh = key(&usage, &lost, t, i);
            if fresh != stale {
                heap.push(Reverse(fresh));
                continue;
            }
            for &b in by_item.get(&i).map_or(&[][..], Vec::as_slice) {
                if supp[b].binary_search(&t).is_err() || (exact && lost.contains(&(b, t))) {
                    continue;
                }
                usage[b] += 1;
                lost.insert((b, t));
            }
            removed.push((t, i));
            removed_set.insert((t, i));
            done.insert(t);
            live -= 1;
        }
    }
    (removed, usage)
}

impl HidingAlgorithm for Inline {
    fn descriptor(&self) -> &AlgorithmDescriptor {
        &self.descriptor
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Outcome> {
        let start = Instant::now();
        let budget = ctx.options.budget;
        let exact = ctx.options.exact_border;
        let border: Vec<Itemset> = ctx.positive_border().iter().map(|(x, _)| x.clone()).collect();
        let cm = build_cell_model(
            ctx.db,
            &ctx.sensitive,
            &border,
            ctx.sigma_min,
            CellModelOptions { exact_border: exact },
        )?;
        ctx.dump_lp(&cm.model)?;
        let mut notes = Vec::new();
        let mut relaxed: Vec<usize> = Vec::new();
        loop {
            let (hint, usage) = greedy_cells(ctx, &cm, exact, &relaxed);
            let mut model = cm.without_rows(&relaxed);
            model.warm_start = Some(cm.assignment(&hint));
            let remaining = SolverBudget {
                time_limit: budget.time_limit.saturating_sub(start.elapsed()),
                node_limit: budget.node_limit,
            };
            match solve_ilp(&model, remaining) {
                Ok(sol) if sol.status != SolveStatus::Infeasible => {
                    if sol.status == SolveStatus::TimeoutIncumbent {
                        notes.push(format!(
                            "solver budget expired after {} nodes; best plan has {} deletions (relaxation bound {:.3})",
                            sol.stats.nodes, sol.objective_value, sol.stats.root_bound
                        ));
                    }
                    let mut deletions = cm.selected(&sol.values);
                    deletions.sort_unstable();
                    return Ok(Outcome { deletions, notes });
                }
                Err(SolverError::BudgetExhausted) => {
                    // No incumbent in time: keep the greedy plan and report
                    // every border row it overdraws.
                    let mut over: Vec<(u32, &Itemset, u32)> = cm
                        .border_rows
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| !relaxed.contains(&r.row))
                        .filter(|&(b, r)| usage[b] > r.slack)
                        .map(|(b, r)| (usage[b] - r.slack, &r.itemset, r.slack))
                        .collect();
                    over.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
                    notes.push("solver budget expired before a feasible plan was found; kept the greedy plan".into());
                    for (deficit, x, slack) in over {
                        notes.push(format!("relaxed border itemset {{{x}}} (slack {slack}, deficit {deficit})"));
                    }
                    let mut deletions = hint;
                    deletions.sort_unstable();
                    return Ok(Outcome { deletions, notes });
                }
                Ok(_) => {
                    // Relax the border row the greedy plan overdraws most.
                    let victim = cm
                        .border_rows
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| !relaxed.contains(&r.row))
                        .map(|(b, r)| (usage[b].saturating_sub(r.slack), b))
                        .filter(|&(deficit, _)| deficit > 0)
                        .max_by(|a, b| {
                            a.0.cmp(&b.0)
                                .then_with(|| cm.border_rows[b.1].itemset.cmp(&cm.border_rows[a.1].itemset))
                        });
                    let Some((deficit, b)) = victim else {
                        return Err(Error::Integrity(
                            "cell model rejected a plan that satisfies every row".into(),
                        ));
                    };
                    let r = &cm.border_rows[b];
                    notes.push(format!(
                        "relaxed border itemset {{{}}} (slack {}, deficit {deficit})",
                        r.itemset, r.slack
                    ));
                    relaxed.push(r.row);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

#[cfg(test)]
pub(crate) fn revised_members_for_test(revised: &FrequentSet, row: &[Item]) -> u64 {
    revised_members_in(revised, row)
}
