use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{parse_grid, Grid};

/// Puzzles in the reference corpus all have this many clues.
pub const EXPECTED_MIN_CLUES: usize = 17;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetEntry {
    pub puzzle: Grid,
    /// 1-based line in the source file.
    pub line_number: usize,
    pub reference: Option<Grid>,
}

/// Reads one puzzle per line. A line holds an 81-character puzzle
/// (`0` or `.` for blanks), optionally followed by its 81-character solution
/// after whitespace, `,`, `;` or `:`. Blank lines and lines starting with
/// `#` are skipped.
pub fn load_dataset(path: &Path) -> Result<Vec<DatasetEntry>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    parse_dataset(&text, path)
}

/// [`load_dataset`] on in-memory text; `path` is only used in errors.
pub fn parse_dataset(text: &str, path: &Path) -> Result<Vec<DatasetEntry>> {
    let mut entries = Vec::new();
    let mut sparse = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line_number = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |reason: String| Error::MalformedLine {
            path: path.to_path_buf(),
            line: line_number,
            reason,
        };
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || matches!(c, ',' | ';' | ':'))
            .filter(|f| !f.is_empty())
            .collect();
        let (puzzle_text, solution_text) = match fields.as_slice() {
            [p] => (*p, None),
            [p, s] => (*p, Some(*s)),
            _ => return Err(malformed(format!("expected 1 or 2 fields, found {}", fields.len()))),
        };
        let puzzle = parse_field(puzzle_text).map_err(|r| malformed(format!("puzzle: {r}")))?;
        let reference = match solution_text {
            None => None,
            Some(s) => {
                let g = parse_field(s).map_err(|r| malformed(format!("solution: {r}")))?;
                if !g.is_complete() || !g.extends(&puzzle) {
                    return Err(malformed("solution is incomplete or disagrees with the puzzle".into()));
                }
                Some(g)
            }
        };
        if puzzle.filled_count() < EXPECTED_MIN_CLUES {
            sparse += 1;
            log::warn!(
                "{}:{line_number}: only {} clues",
                path.display(),
                puzzle.filled_count()
            );
        }
        entries.push(DatasetEntry {
            puzzle,
            line_number,
            reference,
        });
    }
    if sparse > 0 {
        log::warn!("{}: {sparse} puzzles below {EXPECTED_MIN_CLUES} clues", path.display());
    }
    Ok(entries)
}

fn parse_field(text: &str) -> std::result::Result<Grid, String> {
    if text.chars().count() != 81 {
        return Err(format!("expected 81 characters, found {}", text.chars().count()));
    }
    parse_grid(text).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fixtures::{FIGURE1_PUZZLE, FIGURE1_SOLUTION};

    fn parse(text: &str) -> Result<Vec<DatasetEntry>> {
        parse_dataset(text, Path::new("mem.txt"))
    }

    #[test]
    fn three_lines() {
        let text = format!("{FIGURE1_PUZZLE}\n# comment\n\n{FIGURE1_PUZZLE}\n{FIGURE1_PUZZLE}\n");
        let e = parse(&text).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.iter().map(|x| x.line_number).collect::<Vec<_>>(), vec![1, 4, 5]);
        assert!(e.iter().all(|x| x.reference.is_none()));
    }

    #[test]
    fn short_line_reports_its_number() {
        let text = format!("{FIGURE1_PUZZLE}\n{}\n", &FIGURE1_PUZZLE[..80]);
        match parse(&text) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solution_column() {
        let e = parse(&format!("{FIGURE1_PUZZLE},{FIGURE1_SOLUTION}\n")).unwrap();
        assert_eq!(e[0].reference.unwrap().to_string(), FIGURE1_SOLUTION);
        let dots = FIGURE1_PUZZLE.replace('0', ".");
        let e = parse(&format!("{dots} {FIGURE1_SOLUTION}")).unwrap();
        assert_eq!(e[0].puzzle.to_string(), FIGURE1_PUZZLE);
        // A solution that contradicts a clue is rejected.
        let wrong = FIGURE1_SOLUTION.replacen('1', "2", 1);
        assert!(parse(&format!("{FIGURE1_PUZZLE} {wrong}")).is_err());
    }

    #[test]
    fn missing_file() {
        let err = load_dataset(Path::new("/nonexistent/puzzles.txt")).unwrap_err();
        assert!(matches!(err, Error::FileNotFound(_)));
    }

    #[test]
    fn sparse_puzzles_still_load() {
        let e = parse(&"0".repeat(81)).unwrap();
        assert_eq!(e.len(), 1);
    }
}
