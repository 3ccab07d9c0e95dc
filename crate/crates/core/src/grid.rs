//! 9×9 grids: parsing, formatting, unit geometry and rule validation.
//!
//! Puzzles, partial solutions and complete solutions all share the [`Grid`]
//! type. Cell `k` sits at row `k / 9`, column `k % 9`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of cells in a grid.
pub const CELLS: usize = 81;

/// A cell value: `0` is blank, `1..=9` a placed digit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digit(u8);

impl Digit {
    pub const BLANK: Digit = Digit(0);

    pub fn new(value: u8) -> Result<Self> {
        if value <= 9 {
            Ok(Digit(value))
        } else {
            Err(Error::InvalidDigit(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_blank(self) -> bool {
        self.0 == 0
    }
}

impl TryFrom<u8> for Digit {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Digit::new(value)
    }
}

/// An 81-cell grid in row-major order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    cells: [Digit; CELLS],
}

impl Default for Grid {
    fn default() -> Self {
        Grid::empty()
    }
}

impl Grid {
    pub fn empty() -> Self {
        Grid {
            cells: [Digit::BLANK; CELLS],
        }
    }

    /// Builds a grid from raw cell values (`0` = blank).
    pub fn from_values(values: &[u8]) -> Result<Self> {
        if values.len() != CELLS {
            return Err(Error::MalformedInput(format!(
                "expected {CELLS} cells, got {}",
                values.len()
            )));
        }
        let mut grid = Grid::empty();
        for (k, &v) in values.iter().enumerate() {
            grid.cells[k] = Digit::new(v)?;
        }
        Ok(grid)
    }

    /// Raw value of cell `k`, `0` when blank.
    #[inline]
    pub fn get(&self, k: usize) -> u8 {
        self.cells[k].0
    }

    #[inline]
    pub fn digit(&self, k: usize) -> Digit {
        self.cells[k]
    }

    /// Sets cell `k`; `value` must be in `0..=9`.
    pub fn set(&mut self, k: usize, value: u8) {
        assert!(value <= 9, "digit out of range: {value}");
        self.cells[k] = Digit(value);
    }

    pub fn clear(&mut self, k: usize) {
        self.cells[k] = Digit::BLANK;
    }

    pub fn values(&self) -> [u8; CELLS] {
        self.cells.map(|d| d.0)
    }

    pub fn filled_count(&self) -> usize {
        self.cells.iter().filter(|d| !d.is_blank()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|d| !d.is_blank())
    }

    /// Filled cells as `(cell, digit)` pairs in row-major order.
    pub fn filled(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_blank())
            .map(|(k, d)| (k, d.0))
    }

    /// True if every filled cell of `puzzle` holds the same digit here.
    pub fn extends(&self, puzzle: &Grid) -> bool {
        puzzle.filled().all(|(k, d)| self.get(k) == d)
    }

    /// Keeps only the cells listed in `clues`, blanking the rest.
    pub fn restricted_to(&self, clues: &ClueSet) -> Grid {
        let mut out = Grid::empty();
        for k in clues.iter() {
            out.cells[k] = self.cells[k];
        }
        out
    }

    /// Multi-line rendering for logs: nine rows, `.` for blanks.
    pub fn pretty(&self) -> String {
        let mut s = String::with_capacity(9 * 10);
        for r in 0..9 {
            for c in 0..9 {
                let v = self.get(9 * r + c);
                s.push(if v == 0 { '.' } else { char::from(b'0' + v) });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_grid(self))
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({})", format_grid(self))
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s)
    }
}

impl Serialize for Grid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_grid(self))
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_grid(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses the 81-character line format. Whitespace is ignored; `0` and `.`
/// both denote a blank.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let mut grid = Grid::empty();
    let mut n = 0usize;
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        let v = match ch {
            '.' | '0' => 0,
            '1'..='9' => ch as u8 - b'0',
            other => {
                return Err(Error::MalformedInput(format!(
                    "illegal character {other:?} at position {n}"
                )))
            }
        };
        if n < CELLS {
            grid.cells[n] = Digit(v);
        }
        n += 1;
    }
    if n != CELLS {
        return Err(Error::MalformedInput(format!(
            "expected {CELLS} cells, got {n}"
        )));
    }
    Ok(grid)
}

/// Single-line 81-character rendering with `0` for blanks.
pub fn format_grid(g: &Grid) -> String {
    g.cells.iter().map(|d| char::from(b'0' + d.0)).collect()
}

/// Positions given in the original puzzle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClueSet {
    mask: [bool; CELLS],
    len: usize,
}

impl ClueSet {
    pub fn of(puzzle: &Grid) -> Self {
        let mut set = ClueSet {
            mask: [false; CELLS],
            len: 0,
        };
        for (k, _) in puzzle.filled() {
            set.mask[k] = true;
            set.len += 1;
        }
        set
    }

    pub fn contains(&self, k: usize) -> bool {
        self.mask[k]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..CELLS).filter(|&k| self.mask[k])
    }
}

/// The 27 units: rows `0..9`, columns `9..18`, boxes `18..27`.
pub const UNITS: [[usize; 9]; 27] = build_units();

const fn build_units() -> [[usize; 9]; 27] {
    let mut units = [[0usize; 9]; 27];
    let mut i = 0;
    while i < 9 {
        let mut j = 0;
        while j < 9 {
            units[i][j] = 9 * i + j;
            units[9 + i][j] = 9 * j + i;
            let br = 3 * (i / 3) + j / 3;
            let bc = 3 * (i % 3) + j % 3;
            units[18 + i][j] = 9 * br + bc;
            j += 1;
        }
        i += 1;
    }
    units
}

#[inline]
pub fn box_of(cell: usize) -> usize {
    3 * (cell / 27) + (cell % 9) / 3
}

/// Row, column and box units containing `cell`.
pub fn units_of(cell: usize) -> ([usize; 9], [usize; 9], [usize; 9]) {
    assert!(cell < CELLS, "cell index out of range: {cell}");
    (UNITS[cell / 9], UNITS[9 + cell % 9], UNITS[18 + box_of(cell)])
}

/// The 20 cells sharing a unit with `cell`, ascending.
pub fn peers(cell: usize) -> Vec<usize> {
    let (r, c, b) = units_of(cell);
    let set: BTreeSet<usize> = r.iter().chain(&c).chain(&b).copied().collect();
    set.into_iter().filter(|&k| k != cell).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Solved,
    Incomplete,
    Conflicted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationResult {
    pub status: Status,
    /// Cells whose digit is repeated within at least one of their units.
    pub conflicts: BTreeSet<usize>,
}

impl ValidationResult {
    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }
}

pub fn validate(g: &Grid) -> ValidationResult {
    let conflicts = conflicts(g);
    let status = if !conflicts.is_empty() {
        Status::Conflicted
    } else if g.is_complete() {
        // 81 filled cells with no repeat in any unit: each unit holds 1..=9.
        Status::Solved
    } else {
        Status::Incomplete
    };
    ValidationResult { status, conflicts }
}

/// Every cell whose digit has multiplicity ≥ 2 in one of its units.
pub fn conflicts(g: &Grid) -> BTreeSet<usize> {
    let mut flagged = [false; CELLS];
    for unit in UNITS.iter() {
        let mut seen = [0u8; 10];
        for &k in unit {
            seen[g.get(k) as usize] += 1;
        }
        for &k in unit {
            let v = g.get(k) as usize;
            if v != 0 && seen[v] >= 2 {
                flagged[k] = true;
            }
        }
    }
    (0..CELLS).filter(|&k| flagged[k]).collect()
}

pub fn has_conflicts(g: &Grid) -> bool {
    UNITS.iter().any(|unit| {
        let mut seen = 0u16;
        unit.iter().any(|&k| {
            let v = g.get(k);
            if v == 0 {
                return false;
            }
            let bit = 1 << v;
            let dup = seen & bit != 0;
            seen |= bit;
            dup
        })
    })
}
