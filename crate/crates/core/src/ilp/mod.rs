//! Integer linear programs behind the ILP-based hiding algorithms and an
//! embedded branch-and-bound solver for them.

mod build;
mod model;
mod solve;

pub use build::{
    build_cell_model, build_transaction_model, remove_duplicate_rows, BorderRow, CellModel,
    CellModelOptions, TransactionModel,
};
pub use model::{Constraint, LinearModel, Relation, RowTag, VarTag, TOLERANCE};
pub use solve::{solve_ilp, solve_lp, Solution, SolveStats, SolveStatus, SolverBudget, SolverError};
