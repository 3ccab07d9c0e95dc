//! Batch runs over a puzzle corpus and the reports they produce.

mod dataset;
mod report;

pub use dataset::{load_dataset, parse_dataset, DatasetEntry, EXPECTED_MIN_CLUES};
pub use report::{emit_report, render_report, ReportFormat};

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelConfig;
use crate::oracle::backtrack_solve;
use crate::strategy::{solve_pipeline_with, Difficulty, Stage, StrategyOptions};

#[derive(Clone, Copy, Debug)]
pub struct BatchOptions {
    /// `None` runs every entry.
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    pub strategy: StrategyOptions,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            sample_size: None,
            seed: 0,
            workers: 1,
            strategy: StrategyOptions::full(),
        }
    }
}

/// The run parameters as recorded in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigDescriptor {
    pub method: String,
    pub constraint_set: String,
    /// Present for the reweighted model only.
    pub epsilon: Option<f64>,
    pub strategy: bool,
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub workers: usize,
}

impl ConfigDescriptor {
    fn new(cfg: &ModelConfig, opts: &BatchOptions) -> Self {
        ConfigDescriptor {
            method: cfg.method_label(),
            constraint_set: cfg.constraint_label().to_string(),
            epsilon: cfg.reweighted.then_some(cfg.epsilon),
            strategy: opts.strategy.enabled,
            sample_size: opts.sample_size,
            seed: opts.seed,
            workers: opts.workers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuzzleRecord {
    pub line_number: usize,
    pub stage: Stage,
    pub difficulty: Difficulty,
    pub attempts: usize,
    pub millis: u64,
    /// For successes: whether the grid matched the backtracking solution
    /// (and the reference solution, when the dataset has one).
    pub verified: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub config: ConfigDescriptor,
    pub total: usize,
    pub first_solving: usize,
    pub step1: usize,
    pub step2: usize,
    pub step3: usize,
    pub solved_total: usize,
    pub elapsed_seconds: f64,
    pub per_puzzle: Vec<PuzzleRecord>,
}

impl BatchReport {
    /// Successes whose grid disagreed with the oracle.
    pub fn unverified(&self) -> usize {
        self.per_puzzle.iter().filter(|r| r.verified == Some(false)).count()
    }

    /// Zeroes the wall-clock fields, leaving what a rerun must reproduce.
    pub fn without_timing(&self) -> BatchReport {
        let mut r = self.clone();
        r.elapsed_seconds = 0.0;
        for p in &mut r.per_puzzle {
            p.millis = 0;
        }
        r
    }
}

/// Indices of the entries a batch visits: a seeded uniform sample without
/// replacement, in file order.
pub fn sample_indices(len: usize, sample_size: Option<usize>, seed: u64) -> Result<Vec<usize>> {
    match sample_size {
        None => Ok((0..len).collect()),
        Some(n) if n > len => Err(Error::InvalidConfig(format!(
            "sample of {n} requested from {len} entries"
        ))),
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = rand::seq::index::sample(&mut rng, len, n).into_vec();
            idx.sort_unstable();
            Ok(idx)
        }
    }
}

/// Runs the pipeline on the selected entries. Per-puzzle failures are
/// recorded in the report, never returned.
pub fn run_batch(entries: &[DatasetEntry], cfg: &ModelConfig, opts: &BatchOptions) -> Result<BatchReport> {
    cfg.validate()?;
    if opts.workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let chosen = sample_indices(entries.len(), opts.sample_size, opts.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let per_puzzle: Vec<PuzzleRecord> = pool.install(|| {
        chosen
            .par_iter()
            .map(|&i| run_one(&entries[i], cfg, &opts.strategy))
            .collect()
    });
    let elapsed_seconds = start.elapsed().as_secs_f64();

    let count = |s: Stage| per_puzzle.iter().filter(|r| r.stage == s).count();
    let (first_solving, step1, step2, step3) =
        (count(Stage::First), count(Stage::Step1), count(Stage::Step2), count(Stage::Step3));
    Ok(BatchReport {
        config: ConfigDescriptor::new(cfg, opts),
        total: per_puzzle.len(),
        first_solving,
        step1,
        step2,
        step3,
        solved_total: first_solving + step1 + step2 + step3,
        elapsed_seconds,
        per_puzzle,
    })
}

fn run_one(entry: &DatasetEntry, cfg: &ModelConfig, strategy: &StrategyOptions) -> PuzzleRecord {
    let start = Instant::now();
    let outcome = solve_pipeline_with(&entry.puzzle, cfg, entry.reference.as_ref(), strategy);
    let millis = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(out) => {
            let verified = out.success.then(|| {
                let oracle_ok = backtrack_solve(&entry.puzzle) == Some(out.final_grid);
                oracle_ok && out.matches_reference != Some(false)
            });
            if verified == Some(false) {
                log::error!("line {}: pipeline answer disagrees with the oracle", entry.line_number);
            }
            PuzzleRecord {
                line_number: entry.line_number,
                stage: out.stage,
                difficulty: out.difficulty,
                attempts: out.step3_attempts,
                millis,
                verified,
                error: None,
            }
        }
        Err(e) => {
            log::warn!("line {}: {e}", entry.line_number);
            PuzzleRecord {
                line_number: entry.line_number,
                stage: Stage::Failed,
                difficulty: Difficulty::Devil,
                attempts: 0,
                millis,
                verified: None,
                error: Some(e.to_string()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fixtures::figure1;
    use crate::models::Formulation;

    fn entries(n: usize) -> Vec<DatasetEntry> {
        let (p, s) = figure1();
        (0..n)
            .map(|i| DatasetEntry {
                puzzle: p,
                line_number: i + 1,
                reference: Some(s),
            })
            .collect()
    }

    #[test]
    fn sampling_is_seeded_sorted_and_distinct() {
        let a = sample_indices(100, Some(10), 7).unwrap();
        assert_eq!(a, sample_indices(100, Some(10), 7).unwrap());
        assert_ne!(a, sample_indices(100, Some(10), 8).unwrap());
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_indices(5, None, 0).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(sample_indices(5, Some(6), 0).is_err());
    }

    #[test]
    fn empty_sample() {
        let opts = BatchOptions {
            sample_size: Some(0),
            ..BatchOptions::default()
        };
        let r = run_batch(&entries(3), &ModelConfig::p1(Formulation::Lp2, false), &opts).unwrap();
        assert_eq!((r.total, r.solved_total), (0, 0));
        assert!(r.per_puzzle.is_empty());
    }

    #[test]
    fn tallies_add_up() {
        let opts = BatchOptions {
            sample_size: Some(2),
            workers: 2,
            ..BatchOptions::default()
        };
        let r = run_batch(&entries(4), &ModelConfig::p1(Formulation::Lp2, false), &opts).unwrap();
        assert_eq!(r.total, 2);
        assert_eq!(r.solved_total, r.first_solving + r.step1 + r.step2 + r.step3);
        assert!(r.per_puzzle.iter().all(|p| p.stage == Stage::First && p.verified == Some(true)));
        assert_eq!(r.unverified(), 0);
    }

    #[test]
    fn bad_worker_count() {
        let opts = BatchOptions {
            workers: 0,
            ..BatchOptions::default()
        };
        assert!(run_batch(&entries(1), &ModelConfig::p1(Formulation::Lp2, false), &opts).is_err());
    }
}
