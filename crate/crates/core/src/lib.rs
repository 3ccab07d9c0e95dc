//! Sudoku as sparse recovery: a puzzle becomes an underdetermined 0/1
//! system `A x = 1` over 729 indicator variables, solved by ℓ1 or
//! reweighted-ℓ1 minimization through a built-in simplex LP solver, with a
//! conflict-pruning restart strategy for puzzles the first solve gets wrong.

pub mod bench;
pub mod encode;
pub mod error;
pub mod grid;
pub mod lp;
pub mod models;
pub mod oracle;
pub mod strategy;

pub use encode::{build_system, grid_to_indicator, round_to_grid, ConstraintSystem, IndicatorVector};
pub use error::{Error, Result};
pub use grid::{format_grid, parse_grid, validate, ClueSet, Grid, Status, ValidationResult};
pub use models::{Formulation, ModelConfig};
pub use oracle::{backtrack_solve, count_solutions, SolutionCount};

pub use strategy::{solve_pipeline, Difficulty, SolveOutcome, Stage};
