//! The 0/1 linear system `A x = 1` whose binary solutions are the grid's
//! completions, and conversions between grids and indicator vectors.
//!
//! Variable `9·k + (d − 1)` is the indicator that cell `k` holds digit `d`.
//! Rows come in five blocks, always in this order: one row per (grid row,
//! digit), per (column, digit), per (box, digit), one per cell, and one per
//! clue.

use std::io::Write;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::grid::{has_conflicts, Grid, CELLS, UNITS};

/// Number of indicator variables.
pub const VARS: usize = 729;
/// Rows in the row/column/box/cell blocks.
pub const STRUCTURAL_ROWS: usize = 324;

#[inline]
pub fn var_index(cell: usize, digit: u8) -> usize {
    debug_assert!((1..=9).contains(&digit));
    9 * cell + (digit as usize - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Row,
    Col,
    Box,
    Cell,
    Clue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowBlock {
    pub kind: BlockKind,
    pub rows: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    matrix: Vec<u8>,
    rows: usize,
    clue_count: usize,
    blocks: Vec<RowBlock>,
}

impl ConstraintSystem {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        VARS
    }

    pub fn clue_count(&self) -> usize {
        self.clue_count
    }

    pub fn row_blocks(&self) -> &[RowBlock] {
        &self.blocks
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.matrix[i * VARS..(i + 1) * VARS]
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.matrix[i * VARS + j]
    }

    /// Appends a row asserting `x[9·cell + digit − 1] = 1` without any
    /// consistency check.
    pub fn with_assignment_row(mut self, cell: usize, digit: u8) -> Self {
        let mut row = vec![0u8; VARS];
        row[var_index(cell, digit)] = 1;
        self.matrix.extend_from_slice(&row);
        self.rows += 1;
        if let Some(last) = self.blocks.last_mut() {
            last.rows.end = self.rows;
        }
        self
    }

    /// The all-ones right-hand side.
    pub fn rhs(&self) -> Vec<f64> {
        vec![1.0; self.rows]
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), VARS);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(&a, _)| a != 0)
                    .map(|(_, &v)| v)
                    .sum()
            })
            .collect()
    }

    /// `‖A x − 1‖∞`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.mul(x)
            .into_iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The matrix as reals, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        self.matrix.iter().map(|&a| f64::from(a)).collect()
    }

    /// Writes one line of `0`/`1` characters per row.
    pub fn dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.rows {
            let line: Vec<u8> = self.row(i).iter().map(|&a| b'0' + a).collect();
            w.write_all(&line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Builds the system for `puzzle`; fails on puzzles that already repeat a
/// digit within a unit.
pub fn build_system(puzzle: &Grid) -> Result<ConstraintSystem> {
    if has_conflicts(puzzle) {
        return Err(Error::ConflictedPuzzle);
    }
    let clue_count = puzzle.filled_count();
    let rows = STRUCTURAL_ROWS + clue_count;
    let mut matrix = vec![0u8; rows * VARS];
    let mut blocks = Vec::with_capacity(5);

    // Units 0..9 are rows, 9..18 columns, 18..27 boxes.
    for (b, kind) in [BlockKind::Row, BlockKind::Col, BlockKind::Box].into_iter().enumerate() {
        let start = 81 * b;
        for u in 0..9 {
            for d in 1..=9u8 {
                let i = start + 9 * u + (d as usize - 1);
                for &k in &UNITS[9 * b + u] {
                    matrix[i * VARS + var_index(k, d)] = 1;
                }
            }
        }
        blocks.push(RowBlock { kind, rows: start..start + 81 });
    }
    for k in 0..CELLS {
        let i = 243 + k;
        matrix[i * VARS + 9 * k..i * VARS + 9 * k + 9].fill(1);
    }
    blocks.push(RowBlock { kind: BlockKind::Cell, rows: 243..324 });
    for (n, (k, d)) in puzzle.filled().enumerate() {
        let i = STRUCTURAL_ROWS + n;
        matrix[i * VARS + var_index(k, d)] = 1;
    }
    blocks.push(RowBlock {
        kind: BlockKind::Clue,
        rows: STRUCTURAL_ROWS..rows,
    });

    Ok(ConstraintSystem {
        matrix,
        rows,
        clue_count,
        blocks,
    })
}

/// A 729-entry real vector: 81 stacked 9-entry cell sub-vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorVector(Vec<f64>);

impl IndicatorVector {
    pub fn zeros() -> Self {
        IndicatorVector(vec![0.0; VARS])
    }

    pub fn from_vec(entries: Vec<f64>) -> Result<Self> {
        if entries.len() != VARS {
            return Err(Error::DimensionMismatch(format!(
                "indicator vector needs {VARS} entries, got {}",
                entries.len()
            )));
        }
        Ok(IndicatorVector(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn cell(&self, k: usize) -> &[f64] {
        &self.0[9 * k..9 * k + 9]
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn distance(&self, other: &IndicatorVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// One-hot encoding of a complete grid.
pub fn grid_to_indicator(g: &Grid) -> Result<IndicatorVector> {
    if !g.is_complete() {
        return Err(Error::IncompleteGrid);
    }
    let mut x = vec![0.0; VARS];
    for (k, d) in g.filled() {
        x[var_index(k, d)] = 1.0;
    }
    Ok(IndicatorVector(x))
}

/// 1-based position of the largest entry; the smallest digit wins ties.
pub fn argmax_digit(sub: &[f64]) -> u8 {
    let mut best = 0;
    for (i, &v) in sub.iter().enumerate().skip(1) {
        if v > sub[best] {
            best = i;
        }
    }
    best as u8 + 1
}

/// Per-cell argmax decoding; the result has no blanks.
pub fn round_to_grid(x: &IndicatorVector) -> Grid {
    let mut g = Grid::empty();
    for k in 0..CELLS {
        g.set(k, argmax_digit(x.cell(k)));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fixtures::figure1;
    use crate::oracle::backtrack_solve;
    use proptest::prelude::*;

    #[test]
    fn figure1_system_shape() {
        let (p, _) = figure1();
        let sys = build_system(&p).unwrap();
        assert_eq!((sys.rows(), sys.cols()), (341, 729));
        assert_eq!(sys.clue_count(), 17);
        assert!(sys.rhs().iter().all(|&b| b == 1.0));
        let kinds: Vec<_> = sys.row_blocks().iter().map(|b| (b.kind, b.rows.len())).collect();
        assert_eq!(
            kinds,
            vec![
                (BlockKind::Row, 81),
                (BlockKind::Col, 81),
                (BlockKind::Box, 81),
                (BlockKind::Cell, 81),
                (BlockKind::Clue, 17)
            ]
        );
    }

    #[test]
    fn blank_puzzle_has_only_structural_rows() {
        let sys = build_system(&Grid::empty()).unwrap();
        assert_eq!((sys.rows(), sys.cols()), (324, 729));
    }

    #[test]
    fn first_row_constraint_pattern() {
        let sys = build_system(&Grid::empty()).unwrap();
        let ones: Vec<usize> = (0..VARS).filter(|&j| sys.entry(0, j) == 1).collect();
        assert_eq!(ones, (0..9).map(|c| 9 * c).collect::<Vec<_>>());
        // First column, digit 1: cells 0, 9, .., 72.
        let ones: Vec<usize> = (0..VARS).filter(|&j| sys.entry(81, j) == 1).collect();
        assert_eq!(ones, (0..9).map(|r| 81 * r).collect::<Vec<_>>());
        // First cell.
        let ones: Vec<usize> = (0..VARS).filter(|&j| sys.entry(243, j) == 1).collect();
        assert_eq!(ones, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn clue_row_for_row2_col8_digit2() {
        let (p, _) = figure1();
        let sys = build_system(&p).unwrap();
        // Second clue in row-major order is (row 1, col 7) = 2: 144 zeros, then 0,1,...
        let row = sys.row(STRUCTURAL_ROWS + 1);
        let ones: Vec<usize> = (0..VARS).filter(|&j| row[j] == 1).collect();
        assert_eq!(ones, vec![145]);
    }

    #[test]
    fn row_and_column_counts() {
        let (p, _) = figure1();
        let sys = build_system(&p).unwrap();
        for i in 0..sys.rows() {
            let ones = sys.row(i).iter().filter(|&&a| a == 1).count();
            assert!(sys.row(i).iter().all(|&a| a <= 1));
            assert_eq!(ones, if i < STRUCTURAL_ROWS { 9 } else { 1 });
        }
        for j in 0..VARS {
            let s: u32 = (0..STRUCTURAL_ROWS).map(|i| sys.entry(i, j) as u32).sum();
            assert_eq!(s, 4);
        }
    }

    #[test]
    fn conflicted_puzzle_rejected() {
        let mut p = Grid::empty();
        p.set(0, 4);
        p.set(10, 4);
        assert!(matches!(build_system(&p), Err(Error::ConflictedPuzzle)));
    }

    #[test]
    fn solution_satisfies_system_exactly() {
        let (p, s) = figure1();
        let sys = build_system(&p).unwrap();
        let x = grid_to_indicator(&s).unwrap();
        // Integer matrix-vector product computed independently of `mul`.
        for i in 0..sys.rows() {
            let dot: u32 = (0..VARS)
                .map(|j| sys.entry(i, j) as u32 * x.as_slice()[j] as u32)
                .sum();
            assert_eq!(dot, 1, "row {i}");
        }
        assert_eq!(sys.residual(x.as_slice()), 0.0);
    }

    #[test]
    fn one_hot_encodings() {
        let ones = Grid::from_values(&[1u8; 81]).unwrap();
        let x = grid_to_indicator(&ones).unwrap();
        let nz: Vec<usize> = (0..VARS).filter(|&j| x.as_slice()[j] != 0.0).collect();
        assert_eq!(nz, (0..81).map(|k| 9 * k).collect::<Vec<_>>());

        let (_, mut s) = figure1();
        s.set(0, 4);
        let x = grid_to_indicator(&s).unwrap();
        assert_eq!(x.cell(0), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(x.as_slice().iter().sum::<f64>(), 81.0);

        assert!(matches!(grid_to_indicator(&Grid::empty()), Err(Error::IncompleteGrid)));
    }

    #[test]
    fn rounding_examples() {
        let e = [0.1, 0.11, 0.3, 0.4, 0.22, 0.211, 0.113, 0.122, 0.33];
        assert_eq!(argmax_digit(&e), 4);
        let mut seven = [0.0; 9];
        seven[6] = 1.0;
        assert_eq!(argmax_digit(&seven), 7);
        assert_eq!(argmax_digit(&[0.0; 9]), 1);
        assert_eq!(argmax_digit(&[0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 2);
        assert!(round_to_grid(&IndicatorVector::zeros()).is_complete());
    }

    #[test]
    fn dump_is_one_line_per_row() {
        let (p, _) = figure1();
        let sys = build_system(&p).unwrap();
        let mut buf = Vec::new();
        sys.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 341);
        assert!(text.lines().all(|l| l.len() == VARS));
    }

    #[test]
    fn cell_block_pins_total_mass() {
        // Any x meeting the cell rows sums to 81, whatever the other rows say.
        let sys = build_system(&Grid::empty()).unwrap();
        let mut x = vec![0.0; VARS];
        for k in 0..81 {
            x[9 * k] = 0.25 + k as f64;
            x[9 * k + 3] = 0.75 - k as f64;
        }
        for i in 243..324 {
            let s: f64 = (0..VARS).filter(|&j| sys.entry(i, j) == 1).map(|j| x[j]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!((x.iter().sum::<f64>() - 81.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn round_inverts_encode(seed in 0u64..500) {
            // Random complete (not necessarily valid) grids.
            let mut v = [0u8; 81];
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            for c in v.iter_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *c = (s >> 59) as u8 % 9 + 1;
            }
            let g = Grid::from_values(&v).unwrap();
            prop_assert_eq!(round_to_grid(&grid_to_indicator(&g).unwrap()), g);
        }

        #[test]
        fn valid_completions_satisfy_their_puzzle(mask in proptest::collection::vec(any::<bool>(), 81)) {
            let s = backtrack_solve(&Grid::empty()).unwrap();
            let mut p = Grid::empty();
            for k in 0..81 {
                if mask[k] {
                    p.set(k, s.get(k));
                }
            }
            let sys = build_system(&p).unwrap();
            let x = grid_to_indicator(&s).unwrap();
            prop_assert_eq!(sys.residual(x.as_slice()), 0.0);
        }
    }
}
