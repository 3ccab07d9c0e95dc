//! A self-contained linear-programming engine for
//! `min cᵀy  s.t.  E y = f,  l ≤ y ≤ u`.
//!
//! The solver is a two-phase bounded-variable primal simplex; see
//! [`Simplex`] for the warm-start interface used by reweighting loops.

mod lu;
mod simplex;

pub use simplex::{Simplex, WarmStart};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub costs: Vec<f64>,
    pub eq_matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Finite lower bounds.
    pub lower: Vec<f64>,
    /// Upper bounds; `f64::INFINITY` for none.
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Nonnegative variables with no upper bounds.
    pub fn new(costs: Vec<f64>, eq_matrix: DenseMatrix, rhs: Vec<f64>) -> Self {
        let n = costs.len();
        LpProblem {
            costs,
            eq_matrix,
            rhs,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.costs.len();
        let m = self.rhs.len();
        if self.eq_matrix.rows() != m || self.eq_matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{}, expected {m}×{n}",
                self.eq_matrix.rows(),
                self.eq_matrix.cols()
            )));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "bounds have lengths {} and {}, expected {n}",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if !l.is_finite() || u.is_nan() || l > u {
                return Err(Error::InvalidBounds {
                    index: j,
                    lower: l,
                    upper: u,
                });
            }
        }
        if self.costs.iter().chain(&self.rhs).chain(&self.eq_matrix.data).any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite problem data".into()));
        }
        Ok(())
    }

    pub fn objective(&self, y: &[f64]) -> f64 {
        self.costs.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    /// `‖E y − f‖∞`.
    pub fn residual(&self, y: &[f64]) -> f64 {
        self.eq_matrix
            .mul(y)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of `l ≤ y ≤ u`.
    pub fn bound_violation(&self, y: &[f64]) -> f64 {
        y.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status` is `Optimal`.
    pub point: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Rule for choosing the entering variable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pricing {
    /// Largest reduced cost.
    #[default]
    Dantzig,
    /// Largest reduced cost relative to a devex reference weight.
    Devex,
}

#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub cost_tol: f64,
    pub pricing: Pricing,
    /// Defaults to `20·(m + n)` when unset.
    pub max_iters: Option<usize>,
    /// Log every pivot at `trace` level.
    pub trace: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feas_tol: 1e-9,
            cost_tol: 1e-9,
            pricing: Pricing::Dantzig,
            max_iters: None,
            trace: false,
        }
    }
}

/// Solves `p` from scratch.
pub fn solve_lp(p: &LpProblem, opts: &LpOptions) -> Result<LpSolution> {
    Ok(Simplex::new(p, *opts)?.solve())
}
