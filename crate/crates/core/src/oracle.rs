//! Exact recursive backtracking: ground truth for everything else.
//!
//! Cells are chosen by minimum remaining values (first such cell in
//! row-major order on ties) and digits are tried in ascending order, so the
//! search is fully deterministic.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::grid::{box_of, Grid, CELLS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionCount {
    Zero,
    One,
    /// Two or more; the search stops at the second solution.
    Many,
}

const ALL: u16 = 0b11_1111_1110;

struct Search {
    cells: [u8; CELLS],
    rows: [u16; 9],
    cols: [u16; 9],
    boxes: [u16; 9],
}

impl Search {
    /// `None` if the givens already repeat a digit in some unit.
    fn new(puzzle: &Grid) -> Option<Self> {
        let mut s = Search {
            cells: [0; CELLS],
            rows: [0; 9],
            cols: [0; 9],
            boxes: [0; 9],
        };
        for (k, d) in puzzle.filled() {
            let bit = 1u16 << d;
            let (r, c, b) = (k / 9, k % 9, box_of(k));
            if (s.rows[r] | s.cols[c] | s.boxes[b]) & bit != 0 {
                return None;
            }
            s.place(k, d);
        }
        Some(s)
    }

    #[inline]
    fn place(&mut self, k: usize, d: u8) {
        let bit = 1u16 << d;
        self.cells[k] = d;
        self.rows[k / 9] |= bit;
        self.cols[k % 9] |= bit;
        self.boxes[box_of(k)] |= bit;
    }

    #[inline]
    fn unplace(&mut self, k: usize, d: u8) {
        let bit = !(1u16 << d);
        self.cells[k] = 0;
        self.rows[k / 9] &= bit;
        self.cols[k % 9] &= bit;
        self.boxes[box_of(k)] &= bit;
    }

    #[inline]
    fn candidates(&self, k: usize) -> u16 {
        ALL & !(self.rows[k / 9] | self.cols[k % 9] | self.boxes[box_of(k)])
    }

    /// Depth-first search calling `visit` on every completion.
    fn run<F>(&mut self, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u8; CELLS]) -> ControlFlow<()>,
    {
        let mut best: Option<(usize, u16)> = None;
        for k in 0..CELLS {
            if self.cells[k] != 0 {
                continue;
            }
            let cand = self.candidates(k);
            let n = cand.count_ones();
            if n == 0 {
                return ControlFlow::Continue(());
            }
            if best.map_or(true, |(_, c)| n < c.count_ones()) {
                best = Some((k, cand));
                if n == 1 {
                    break;
                }
            }
        }
        let Some((k, mut cand)) = best else {
            return visit(&self.cells);
        };
        while cand != 0 {
            let d = cand.trailing_zeros() as u8;
            cand &= cand - 1;
            self.place(k, d);
            let flow = self.run(visit);
            self.unplace(k, d);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn to_grid(cells: &[u8; CELLS]) -> Grid {
    Grid::from_values(cells).expect("search only places digits 1..=9")
}

/// First completion in search order, or `None` when the puzzle has none.
pub fn backtrack_solve(puzzle: &Grid) -> Option<Grid> {
    let mut search = Search::new(puzzle)?;
    let mut found = None;
    let _ = search.run(&mut |cells| {
        found = Some(to_grid(cells));
        ControlFlow::Break(())
    });
    found
}

/// Number of completions, stopping once `cap` have been found.
pub fn count_solutions_up_to(puzzle: &Grid, cap: usize) -> usize {
    let Some(mut search) = Search::new(puzzle) else {
        return 0;
    };
    let mut n = 0;
    let _ = search.run(&mut |_| {
        n += 1;
        if n >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    n
}

pub fn count_solutions(puzzle: &Grid) -> SolutionCount {
    match count_solutions_up_to(puzzle, 2) {
        0 => SolutionCount::Zero,
        1 => SolutionCount::One,
        _ => SolutionCount::Many,
    }
}

/// Up to `limit` completions in search order.
pub fn enumerate_solutions(puzzle: &Grid, limit: usize) -> Vec<Grid> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    if let Some(mut search) = Search::new(puzzle) {
        let _ = search.run(&mut |cells| {
            out.push(to_grid(cells));
            if out.len() >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
    }
    out
}
