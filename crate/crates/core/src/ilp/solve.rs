use std::time::{Duration, Instant};

use log::debug;
use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};

use super::build::remove_duplicate_rows;
use super::model::{LinearModel, Relation, TOLERANCE};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("objective is unbounded")]
    Unbounded,
    #[error("solver budget exhausted before any feasible solution was found")]
    BudgetExhausted,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("LP engine failure: {0}")]
    Engine(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// Budget expired; `values` hold the best feasible solution found.
    TimeoutIncumbent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    /// Branch-and-bound nodes whose relaxation was solved, root included.
    pub nodes: u64,
    /// Objective of the root relaxation (`NaN` if it was not solved).
    pub root_bound: f64,
    /// Smallest relaxation objective over all solved nodes.
    pub min_node_bound: f64,
    pub duplicate_rows: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub stats: SolveStats,
}

impl Solution {
    fn infeasible(stats: SolveStats) -> Self {
        Solution {
            status: SolveStatus::Infeasible,
            values: Vec::new(),
            objective_value: f64::INFINITY,
            stats,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverBudget {
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
}

impl SolverBudget {
    pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

    pub fn with_time_limit(time_limit: Duration) -> Self {
        SolverBudget {
            time_limit,
            node_limit: None,
        }
    }
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self::with_time_limit(Self::DEFAULT_TIME_LIMIT)
    }
}

fn to_lp(model: &LinearModel) -> (Problem, Vec<Variable>) {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = model
        .objective
        .iter()
        .zip(&model.bounds)
        .map(|(&c, &b)| problem.add_var(c, b))
        .collect();
    for row in &model.constraints {
        let op = match row.relation {
            Relation::Le => ComparisonOp::Le,
            Relation::Ge => ComparisonOp::Ge,
            Relation::Eq => ComparisonOp::Eq,
        };
        let terms: Vec<(Variable, f64)> = row.terms.iter().map(|&(v, c)| (vars[v], c)).collect();
        problem.add_constraint(terms, op, row.rhs);
    }
    (problem, vars)
}

fn engine_error(e: microlp::Error) -> SolverError {
    match e {
        microlp::Error::Unbounded => SolverError::Unbounded,
        other => SolverError::Engine(other.to_string()),
    }
}

fn read_values(solution: &microlp::Solution, vars: &[Variable]) -> Vec<f64> {
    vars.iter().map(|&v| solution.var_value_raw(v)).collect()
}

fn prepare(model: &LinearModel) -> Result<(LinearModel, usize), SolverError> {
    model.validate().map_err(SolverError::InvalidModel)?;
    let mut work = model.clone();
    let removed = remove_duplicate_rows(&mut work);
    Ok((work, removed))
}

/// Optimal solution of the LP relaxation (integrality ignored).
pub fn solve_lp(model: &LinearModel) -> Result<Solution, SolverError> {
    let (work, removed) = prepare(model)?;
    let (problem, vars) = to_lp(&work);
    let mut stats = SolveStats {
        nodes: 1,
        root_bound: f64::NAN,
        min_node_bound: f64::NAN,
        duplicate_rows: removed,
    };
    match problem.solve() {
        Err(microlp::Error::Infeasible) => Ok(Solution::infeasible(stats)),
        Err(e) => Err(engine_error(e)),
        Ok(SolveOutcome::Interrupted(_)) => Err(SolverError::BudgetExhausted),
        Ok(SolveOutcome::Solution(s)) => {
            let values = read_values(&s, &vars);
            let objective_value = model.objective_value(&values);
            stats.root_bound = s.objective();
            stats.min_node_bound = s.objective();
            Ok(Solution {
                status: SolveStatus::Optimal,
                values,
                objective_value,
                stats,
            })
        }
    }
}

/// Rounds integral variables to the nearest integer.
fn snap(model: &LinearModel, values: &mut [f64]) {
    for (x, &int) in values.iter_mut().zip(&model.integral) {
        if int {
            *x = x.round();
        }
    }
}

/// Integral variable furthest from integrality; ties go to the lowest index.
fn most_fractional(model: &LinearModel, values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, (&x, &int)) in values.iter().zip(&model.integral).enumerate() {
        if !int {
            continue;
        }
        let frac = x - x.floor();
        if frac <= TOLERANCE || frac >= 1.0 - TOLERANCE {
            continue;
        }
        let distance = (frac - 0.5).abs();
        if best.is_none_or(|(_, _, d)| distance < d) {
            best = Some((k, x, distance));
        }
    }
    best.map(|(k, x, _)| (k, x))
}

/// Integral points derived from a fractional relaxation: everything rounded
/// up, and rounded by the sign of each cost.
fn roundings(model: &LinearModel, values: &[f64]) -> [Vec<f64>; 2] {
    let mut up = values.to_vec();
    let mut by_cost = values.to_vec();
    for k in 0..values.len() {
        if !model.integral[k] {
            continue;
        }
        let x = values[k];
        let (lo, hi) = model.bounds[k];
        up[k] = (x - TOLERANCE).ceil().clamp(lo, hi);
        by_cost[k] = if model.objective[k] > 0.0 {
            (x - TOLERANCE).ceil()
        } else {
            (x + TOLERANCE).floor()
        }
        .clamp(lo, hi);
    }
    [up, by_cost]
}

struct Search<'a> {
    model: &'a LinearModel,
    integral_objective: bool,
    incumbent: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    fn offer(&mut self, mut values: Vec<f64>) {
        snap(self.model, &mut values);
        if !self.model.is_feasible(&values, TOLERANCE) {
            return;
        }
        let obj = self.model.objective_value(&values);
        if self.incumbent.as_ref().is_none_or(|(best, _)| obj < best - TOLERANCE) {
            self.incumbent = Some((obj, values));
        }
    }

    /// `true` when no integral point with relaxation value `bound` can beat
    /// the incumbent.
    fn prunes(&self, bound: f64) -> bool {
        match &self.incumbent {
            None => false,
            Some((best, _)) if self.integral_objective => (bound - TOLERANCE).ceil() >= best - 0.5,
            Some((best, _)) => bound >= best - TOLERANCE,
        }
    }
}

enum Branch {
    Fix(f64),
    AtMost(f64),
    AtLeast(f64),
}

struct Node {
    parent: microlp::Solution,
    parent_bound: f64,
    var: usize,
    branch: Branch,
}

/// Depth-first branch and bound with most-fractional branching, exploring
/// the up branch first. LP relaxations are solved by an embedded simplex.
pub fn solve_ilp(model: &LinearModel, budget: SolverBudget) -> Result<Solution, SolverError> {
    let start = Instant::now();
    let (work, removed) = prepare(model)?;
    let (mut problem, vars) = to_lp(&work);
    problem.set_time_limit(budget.time_limit);
    let mut search = Search {
        model,
        integral_objective: model.has_integral_objective(),
        incumbent: None,
    };
    if let Some(ws) = &model.warm_start {
        search.offer(ws.clone());
    }
    let mut stats = SolveStats {
        nodes: 0,
        root_bound: f64::NAN,
        min_node_bound: f64::INFINITY,
        duplicate_rows: removed,
    };
    let finish = |search: Search, stats: SolveStats, exhausted: bool| match search.incumbent {
        Some((obj, values)) => Ok(Solution {
            status: if exhausted {
                SolveStatus::Optimal
            } else {
                SolveStatus::TimeoutIncumbent
            },
            values,
            objective_value: obj,
            stats,
        }),
        None if exhausted => Ok(Solution::infeasible(stats)),
        None => Err(SolverError::BudgetExhausted),
    };

    let root = match problem.solve() {
        Err(microlp::Error::Infeasible) => return Ok(Solution::infeasible(stats)),
        Err(e) => return Err(engine_error(e)),
        Ok(SolveOutcome::Interrupted(_)) => return finish(search, stats, false),
        Ok(SolveOutcome::Solution(s)) => s,
    };
    stats.nodes = 1;
    stats.root_bound = root.objective();
    stats.min_node_bound = root.objective();

    let mut stack = Vec::new();
    let mut exhausted = true;
    let mut pending = Some((root, None::<f64>));
    loop {
        let (lp, _) = match pending.take() {
            Some(p) => p,
            None => {
                let Some(node) = stack.pop() else { break };
                if start.elapsed() >= budget.time_limit
                    || budget.node_limit.is_some_and(|n| stats.nodes >= n)
                {
                    exhausted = false;
                    break;
                }
                let Node {
                    parent,
                    parent_bound,
                    var,
                    branch,
                } = node;
                if search.prunes(parent_bound) {
                    continue;
                }
                let outcome = match branch {
                    Branch::Fix(v) => parent.fix_var(vars[var], v),
                    Branch::AtMost(v) => parent.add_constraint([(vars[var], 1.0)], ComparisonOp::Le, v),
                    Branch::AtLeast(v) => parent.add_constraint([(vars[var], 1.0)], ComparisonOp::Ge, v),
                };
                match outcome {
                    Err(microlp::Error::Infeasible) => continue,
                    Err(e) => return Err(engine_error(e)),
                    Ok(SolveOutcome::Interrupted(_)) => {
                        exhausted = false;
                        break;
                    }
                    Ok(SolveOutcome::Solution(s)) => {
                        stats.nodes += 1;
                        stats.min_node_bound = stats.min_node_bound.min(s.objective());
                        (s, Some(parent_bound))
                    }
                }
            }
        };
        let bound = lp.objective();
        if search.prunes(bound) {
            continue;
        }
        let values = read_values(&lp, &vars);
        match most_fractional(model, &values) {
            None => search.offer(values),
            Some((var, x)) => {
                if stats.nodes == 1 {
                    for candidate in roundings(model, &values) {
                        search.offer(candidate);
                    }
                    if search.prunes(bound) {
                        continue;
                    }
                }
                let binary = model.bounds[var] == (0.0, 1.0);
                let (down, up) = if binary {
                    (Branch::Fix(0.0), Branch::Fix(1.0))
                } else {
                    (Branch::AtMost(x.floor()), Branch::AtLeast(x.ceil()))
                };
                stack.push(Node {
                    parent: lp.clone(),
                    parent_bound: bound,
                    var,
                    branch: down,
                });
                stack.push(Node {
                    parent: lp,
                    parent_bound: bound,
                    var,
                    branch: up,
                });
            }
        }
    }
    debug!(
        "branch and bound: {} nodes, root bound {:.3}, {:?}",
        stats.nodes,
        stats.root_bound,
        start.elapsed()
    );
    finish(search, stats, exhausted)
}
