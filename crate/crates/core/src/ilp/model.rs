use std::fmt;
use std::io::{self, Write};

use crate::itemset::{Item, Tid};

/// Feasibility and integrality tolerance used when checking solutions.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// Where a variable comes from, used for naming and for decoding solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarTag {
    /// Sanitize transaction `tid`.
    Transaction(Tid),
    /// Delete `item` from transaction `tid`.
    Cell(Tid, Item),
    /// Sensitive itemset number `sensitive` survives intact in `tid`.
    Survives(Tid, usize),
    /// Border itemset number `border` is lost from `tid`.
    Loses(Tid, usize),
    /// Violation of border row number `border` (elastic models only).
    Excess(usize),
    Free(usize),
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarTag::Transaction(t) => write!(f, "x_t{t}"),
            VarTag::Cell(t, i) => write!(f, "u_t{t}_i{i}"),
            VarTag::Survives(t, s) => write!(f, "z_t{t}_s{s}"),
            VarTag::Loses(t, b) => write!(f, "w_t{t}_b{b}"),
            VarTag::Excess(b) => write!(f, "v_b{b}"),
            VarTag::Free(k) => write!(f, "y{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowTag {
    /// Support bound for sensitive itemset number `sensitive`.
    Hiding(usize),
    /// Survival indicator link for (tid, sensitive itemset).
    Link(Tid, usize),
    /// Protection row for border itemset number `border`.
    Border(usize),
    /// Conjunctive loss link for (tid, border itemset).
    LossLink(Tid, usize),
    Free(usize),
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowTag::Hiding(s) => write!(f, "hide_s{s}"),
            RowTag::Link(t, s) => write!(f, "link_t{t}_s{s}"),
            RowTag::Border(b) => write!(f, "border_b{b}"),
            RowTag::LossLink(t, b) => write!(f, "loss_t{t}_b{b}"),
            RowTag::Free(k) => write!(f, "r{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    pub tag: RowTag,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => lhs <= self.rhs + tol,
            Relation::Ge => lhs >= self.rhs - tol,
            Relation::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

/// A minimization problem over bounded, optionally integral variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearModel {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
    pub integral: Vec<bool>,
    pub tags: Vec<VarTag>,
    /// Optional starting assignment; used as the first incumbent when it is
    /// feasible.
    pub warm_start: Option<Vec<f64>>,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, bounds: (f64, f64), integral: bool, tag: VarTag) -> usize {
        self.objective.push(cost);
        self.bounds.push(bounds);
        self.integral.push(integral);
        self.tags.push(tag);
        self.objective.len() - 1
    }

    pub fn add_binary(&mut self, cost: f64, tag: VarTag) -> usize {
        self.add_var(cost, (0.0, 1.0), true, tag)
    }

    pub fn add_constraint(
        &mut self,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
        tag: RowTag,
    ) -> usize {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
            tag,
        });
        self.constraints.len() - 1
    }

    /// Checks that rows reference declared variables once each and bounds
    /// are ordered.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.n_vars();
        if self.bounds.len() != n || self.integral.len() != n || self.tags.len() != n {
            return Err("variable attribute vectors differ in length".into());
        }
        for (k, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(format!("variable {k} has bounds [{lo}, {hi}]"));
            }
        }
        let mut seen = vec![usize::MAX; n];
        for (r, row) in self.constraints.iter().enumerate() {
            for &(v, c) in &row.terms {
                if v >= n {
                    return Err(format!("row {} references undeclared variable {v}", row.tag));
                }
                if seen[v] == r {
                    return Err(format!("row {} repeats variable {v}", row.tag));
                }
                if !c.is_finite() {
                    return Err(format!("row {} has a non-finite coefficient", row.tag));
                }
                seen[v] = r;
            }
            if !row.rhs.is_finite() {
                return Err(format!("row {} has a non-finite right-hand side", row.tag));
            }
        }
        if let Some(ws) = &self.warm_start {
            if ws.len() != n {
                return Err("warm start length differs from variable count".into());
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    /// Bounds, integrality and every row, within `tol`.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.n_vars()
            && values.iter().zip(&self.bounds).zip(&self.integral).all(
                |((&x, &(lo, hi)), &int)| {
                    x >= lo - tol && x <= hi + tol && (!int || (x - x.round()).abs() <= tol)
                },
            )
            && self.constraints.iter().all(|c| c.is_satisfied(values, tol))
    }

    /// Rows violated by `values` (beyond `tol`).
    pub fn violated_rows(&self, values: &[f64], tol: f64) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied(values, tol))
            .map(|(k, _)| k)
            .collect()
    }

    /// `true` when every feasible integral point has an integral objective,
    /// so bounds can be rounded up when pruning.
    pub fn has_integral_objective(&self) -> bool {
        self.objective
            .iter()
            .zip(&self.integral)
            .all(|(&c, &int)| if int { c.fract() == 0.0 } else { c == 0.0 })
    }

    /// Writes the model in CPLEX LP text format.
    pub fn write_lp(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "\\ {} variables, {} rows", self.n_vars(), self.constraints.len())?;
        writeln!(out, "Minimize")?;
        write!(out, " obj:")?;
        let mut any = false;
        for (v, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                write!(out, " {} {} {}", sign(c), c.abs(), self.tags[v])?;
                any = true;
            }
        }
        if !any {
            write!(out, " 0 {}", self.tags.first().map(|t| t.to_string()).unwrap_or_else(|| "x".into()))?;
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for row in &self.constraints {
            write!(out, " {}:", row.tag)?;
            if row.terms.is_empty() {
                write!(out, " 0 {}", self.tags.first().map(|t| t.to_string()).unwrap_or_else(|| "x".into()))?;
            }
            for &(v, c) in &row.terms {
                write!(out, " {} {} {}", sign(c), c.abs(), self.tags[v])?;
            }
            writeln!(out, " {} {}", row.relation, row.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for (v, &(lo, hi)) in self.bounds.iter().enumerate() {
            writeln!(out, " {} <= {} <= {}", fmt_bound(lo), self.tags[v], fmt_bound(hi))?;
        }
        let binaries: Vec<String> = (0..self.n_vars())
            .filter(|&v| self.integral[v] && self.bounds[v] == (0.0, 1.0))
            .map(|v| self.tags[v].to_string())
            .collect();
        let generals: Vec<String> = (0..self.n_vars())
            .filter(|&v| self.integral[v] && self.bounds[v] != (0.0, 1.0))
            .map(|v| self.tags[v].to_string())
            .collect();
        if !binaries.is_empty() {
            writeln!(out, "Binaries")?;
            for chunk in binaries.chunks(8) {
                writeln!(out, " {}", chunk.join(" "))?;
            }
        }
        if !generals.is_empty() {
            writeln!(out, "Generals")?;
            for chunk in generals.chunks(8) {
                writeln!(out, " {}", chunk.join(" "))?;
            }
        }
        writeln!(out, "End")
    }
}

fn sign(c: f64) -> char {
    if c < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn fmt_bound(b: f64) -> String {
    if b == f64::INFINITY {
        "+inf".into()
    } else if b == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        b.to_string()
    }
}
