use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::BatchReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidConfig(format!("unknown report format {s:?}"))),
        }
    }
}

const HEADERS: [&str; 9] = [
    "Methods",
    "Constraint set",
    "ε",
    "First Solving",
    "Step 1",
    "Step 2",
    "Step 3",
    "Total",
    "Time(s)",
];

fn count_cell(n: usize, total: usize) -> String {
    format!("{n}/{:.2}%", 100.0 * n as f64 / total as f64)
}

fn table(r: &BatchReport) -> String {
    let mut rows = vec![HEADERS.map(String::from).to_vec()];
    if r.total > 0 {
        rows.push(vec![
            r.config.method.clone(),
            r.config.constraint_set.clone(),
            r.config.epsilon.map_or("-".into(), |e| e.to_string()),
            count_cell(r.first_solving, r.total),
            count_cell(r.step1, r.total),
            count_cell(r.step2, r.total),
            count_cell(r.step3, r.total),
            count_cell(r.solved_total, r.total),
            format!("{:.4e}", r.elapsed_seconds),
        ]);
    }
    let widths: Vec<usize> = (0..HEADERS.len())
        .map(|c| rows.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        writeln!(out, "{}", cells.join(" | ").trim_end()).unwrap();
    }
    out
}

fn csv_rows(r: &BatchReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["line_number", "stage", "difficulty", "attempts", "millis", "verified", "error"])?;
    for p in &r.per_puzzle {
        w.write_record([
            p.line_number.to_string(),
            p.stage.to_string(),
            p.difficulty.to_string(),
            p.attempts.to_string(),
            p.millis.to_string(),
            p.verified.map_or(String::new(), |v| v.to_string()),
            p.error.clone().unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// The report as text in the requested format.
pub fn render_report(r: &BatchReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Table => Ok(table(r)),
        ReportFormat::Json => Ok(serde_json::to_string_pretty(r)? + "\n"),
        ReportFormat::Csv => csv_rows(r),
    }
}

/// Writes the rendered report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(r: &BatchReport, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    let text = render_report(r, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
