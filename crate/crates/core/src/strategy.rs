//! The restart pipeline run on top of a model solve.
//!
//! A failed first solve is followed by up to three recovery steps:
//!
//! 1. blank every non-clue cell involved in a repeat and solve the smaller
//!    puzzle again;
//! 2. do the same once more, starting from the step 1 result;
//! 3. take the cells that survive pruning of the step 2 result and, one at a
//!    time in row-major order, add a single one of them to the original clues
//!    and solve that puzzle.
//!
//! The grade of a puzzle is the stage that solved it: Easy for the first
//! solve, Middle for steps 1 and 2, Hard for step 3, Devil otherwise.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::encode::{build_system, round_to_grid};
use crate::error::Result;
use crate::grid::{conflicts, has_conflicts, validate, ClueSet, Grid, CELLS};
use crate::lp::WarmStart;
use crate::models::{solve_model_from, ModelConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    First,
    Step1,
    Step2,
    Step3,
    Failed,
}

impl Stage {
    pub fn difficulty(self) -> Difficulty {
        match self {
            Stage::First => Difficulty::Easy,
            Stage::Step1 | Stage::Step2 => Difficulty::Middle,
            Stage::Step3 => Difficulty::Hard,
            Stage::Failed => Difficulty::Devil,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Middle,
    Hard,
    Devil,
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Where step 3 draws its candidate cells from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidatePool {
    /// The pruned step 2 result.
    #[default]
    LastFailure,
    /// Every pruned failed solution, first occurrence of a (cell, digit)
    /// pair wins its row-major slot.
    AllFailures,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategyOptions {
    /// `false` stops after the first solve.
    pub enabled: bool,
    /// Run steps 1 and 2 on every step 3 candidate puzzle as well.
    pub nested_step3: bool,
    pub pool: CandidatePool,
    /// Start every recovery solve from the first solve's final LP basis
    /// instead of from scratch. Roughly halves the cost of the recovery
    /// steps, but the warm solves tend to land back on the vertex that
    /// already failed, so a few more puzzles end up unsolved.
    pub warm_restarts: bool,
}

impl StrategyOptions {
    pub fn full() -> Self {
        StrategyOptions {
            enabled: true,
            nested_step3: false,
            pool: CandidatePool::LastFailure,
            warm_restarts: false,
        }
    }

    pub fn first_solve_only() -> Self {
        StrategyOptions {
            enabled: false,
            ..StrategyOptions::full()
        }
    }
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions::full()
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub success: bool,
    /// The solution when `success`, otherwise the last grid produced.
    pub final_grid: Grid,
    pub stage: Stage,
    pub difficulty: Difficulty,
    /// Step 3 candidates consumed, including the one that succeeded.
    pub step3_attempts: usize,
    pub elapsed: Duration,
    /// `Some(final_grid == reference)` for successes with a reference.
    pub matches_reference: Option<bool>,
}

/// Model solve followed by per-cell rounding. The result is always complete
/// but need not satisfy the rules.
pub fn base_solve(puzzle: &Grid, cfg: &ModelConfig) -> Result<Grid> {
    Ok(solve_from(puzzle, cfg, None)?.0)
}

fn solve_from(puzzle: &Grid, cfg: &ModelConfig, start: Option<&WarmStart>) -> Result<(Grid, WarmStart)> {
    let sys = build_system(puzzle)?;
    let sol = solve_model_from(&sys, cfg, start.cloned())?;
    Ok((round_to_grid(&sol.x), sol.basis))
}

/// Blanks every cell that repeats a digit within one of its units, except
/// the clue cells.
pub fn prune_conflicts(solved: &Grid, clues: &ClueSet) -> Grid {
    let mut out = *solved;
    for k in conflicts(solved) {
        if !clues.contains(k) {
            out.clear(k);
        }
    }
    out
}

fn is_solution(g: &Grid, puzzle: &Grid) -> bool {
    validate(g).is_solved() && g.extends(puzzle)
}

/// Full pipeline with the default strategy.
pub fn solve_pipeline(puzzle: &Grid, cfg: &ModelConfig, reference: Option<&Grid>) -> Result<SolveOutcome> {
    solve_pipeline_with(puzzle, cfg, reference, &StrategyOptions::full())
}

/// Runs the pipeline. Only an LP failure in the first solve is returned as
/// an error; later failed solves count as unsuccessful attempts.
pub fn solve_pipeline_with(
    puzzle: &Grid,
    cfg: &ModelConfig,
    reference: Option<&Grid>,
    opts: &StrategyOptions,
) -> Result<SolveOutcome> {
    let start = Instant::now();
    let clues = ClueSet::of(puzzle);
    let finish = |grid: Grid, stage: Stage, attempts: usize| {
        let success = stage != Stage::Failed;
        SolveOutcome {
            success,
            final_grid: grid,
            stage,
            difficulty: stage.difficulty(),
            step3_attempts: attempts,
            elapsed: start.elapsed(),
            matches_reference: reference.filter(|_| success).map(|r| *r == grid),
        }
    };

    let (g0, basis) = solve_from(puzzle, cfg, None)?;
    if is_solution(&g0, puzzle) {
        return Ok(finish(g0, Stage::First, 0));
    }
    if !opts.enabled {
        return Ok(finish(g0, Stage::Failed, 0));
    }

    let warm = opts.warm_restarts.then_some(basis);
    let warm = warm.as_ref();
    let mut failures = vec![g0];
    if let Some(g) = restart_steps(puzzle, &clues, cfg, warm, &mut failures) {
        return Ok(finish(g.0, g.1, 0));
    }

    let pool = candidates(&failures, &clues, opts.pool);
    for (n, &(k, d)) in pool.iter().enumerate() {
        let mut extended = *puzzle;
        extended.set(k, d);
        if has_conflicts(&extended) {
            continue;
        }
        let solved = if opts.nested_step3 {
            let mut local = Vec::new();
            match solve_from(&extended, cfg, warm) {
                Ok((g, _)) if is_solution(&g, puzzle) => Some(g),
                Ok((g, _)) => {
                    local.push(g);
                    restart_steps(&extended, &ClueSet::of(&extended), cfg, warm, &mut local)
                        .map(|(g, _)| g)
                        .filter(|g| is_solution(g, puzzle))
                }
                Err(e) => {
                    log::debug!("step 3 candidate {n} failed: {e}");
                    None
                }
            }
        } else {
            match solve_from(&extended, cfg, warm) {
                Ok((g, _)) => Some(g).filter(|g| is_solution(g, puzzle)),
                Err(e) => {
                    log::debug!("step 3 candidate {n} failed: {e}");
                    None
                }
            }
        };
        if let Some(g) = solved {
            return Ok(finish(g, Stage::Step3, n + 1));
        }
    }

    let last = *failures.last().expect("first solve recorded");
    Ok(finish(last, Stage::Failed, pool.len()))
}

/// Steps 1 and 2. Each step prunes the latest failed grid in `failures` and
/// appends its own result when that result is not a solution.
fn restart_steps(
    puzzle: &Grid,
    clues: &ClueSet,
    cfg: &ModelConfig,
    start: Option<&WarmStart>,
    failures: &mut Vec<Grid>,
) -> Option<(Grid, Stage)> {
    let mut previous: Option<Grid> = None;
    for stage in [Stage::Step1, Stage::Step2] {
        let latest = *failures.last().expect("at least one failed grid");
        let pruned = prune_conflicts(&latest, clues);
        // The solver is deterministic, so an unchanged puzzle gives an
        // unchanged (failed) answer.
        if previous == Some(pruned) {
            continue;
        }
        previous = Some(pruned);
        match solve_from(&pruned, cfg, start) {
            Ok((g, _)) if is_solution(&g, puzzle) => return Some((g, stage)),
            Ok((g, _)) => failures.push(g),
            Err(e) => log::debug!("{stage} solve failed: {e}"),
        }
    }
    None
}

/// Step 3 candidates: (cell, digit) pairs kept by pruning but not given as
/// clues, in row-major order, at most one per cell.
fn candidates(failures: &[Grid], clues: &ClueSet, pool: CandidatePool) -> Vec<(usize, u8)> {
    let sources: &[Grid] = match pool {
        CandidatePool::LastFailure => &failures[failures.len() - 1..],
        CandidatePool::AllFailures => failures,
    };
    let pruned: Vec<Grid> = sources.iter().map(|g| prune_conflicts(g, clues)).collect();
    let mut out = Vec::new();
    for k in (0..CELLS).filter(|&k| !clues.contains(k)) {
        let mut seen = [false; 10];
        for p in &pruned {
            let d = p.get(k);
            if d != 0 && !seen[d as usize] {
                seen[d as usize] = true;
                out.push((k, d));
            }
        }
    }
    out
}
