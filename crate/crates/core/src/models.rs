//! ℓ1 and reweighted-ℓ1 minimization over the Sudoku system.
//!
//! Two LP formulations are available. `Lp1` splits `x = x̂ − x̌` with both
//! halves nonnegative and minimizes `wᵀ(x̂ + x̌)` subject to `[A, −A]·[x̂; x̌] = b`.
//! `Lp2` assumes a nonnegative solution and minimizes `wᵀx` subject to
//! `A x = b, x ≥ 0`. With `bounded` set, every LP variable is also capped
//! at one.
//!
//! The reweighted solver repeats the weighted LP with
//! `w_k = 1 / (|x_k| + ε)` computed from the previous iterate, starting from
//! `x = 0`, for at most `max_reweight` rounds or until two consecutive
//! iterates are closer than `reweight_tol` in the Euclidean norm.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::encode::{ConstraintSystem, IndicatorVector, VARS};
use crate::error::{Error, Result};
use crate::lp::{DenseMatrix, LpOptions, LpProblem, LpStatus, Simplex, WarmStart};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    Lp1,
    Lp2,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Lp1 => "LP1",
            Formulation::Lp2 => "LP2",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ModelConfig {
    pub formulation: Formulation,
    pub reweighted: bool,
    /// Only read when `reweighted`.
    pub epsilon: f64,
    pub max_reweight: usize,
    pub reweight_tol: f64,
    /// `false`: `x ≥ 0`; `true`: `0 ≤ x ≤ 1`.
    pub bounded: bool,
    pub lp: LpOptions,
}

impl ModelConfig {
    /// Plain ℓ1 minimization.
    pub fn p1(formulation: Formulation, bounded: bool) -> Self {
        ModelConfig {
            formulation,
            reweighted: false,
            epsilon: 1.0,
            max_reweight: 10,
            reweight_tol: 1e-10,
            bounded,
            lp: LpOptions::default(),
        }
    }

    /// Reweighted ℓ1 with the given ε.
    pub fn wp1(formulation: Formulation, bounded: bool, epsilon: f64) -> Self {
        ModelConfig {
            reweighted: true,
            epsilon,
            ..ModelConfig::p1(formulation, bounded)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_reweight == 0 {
            return Err(Error::InvalidConfig("max_reweight must be at least 1".into()));
        }
        if !(self.reweight_tol > 0.0) {
            return Err(Error::InvalidConfig("reweight_tol must be positive".into()));
        }
        Ok(())
    }

    /// Method label as printed in report tables, e.g. `(Weighted LP1)`.
    pub fn method_label(&self) -> String {
        if self.reweighted {
            format!("(Weighted {})", self.formulation)
        } else {
            format!("({})", self.formulation)
        }
    }

    pub fn constraint_label(&self) -> &'static str {
        if self.bounded {
            "{0<=x<=1}"
        } else {
            "{x>=0}"
        }
    }
}

/// Diagonal of `W`: strictly positive, finite.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn uniform(value: f64) -> Self {
        WeightVector(vec![value; VARS])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `w_k = 1 / (|x_k| + ε)`.
pub fn reweight(x_prev: &IndicatorVector, epsilon: f64) -> Result<WeightVector> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(WeightVector(
        x_prev.as_slice().iter().map(|v| 1.0 / (v.abs() + epsilon)).collect(),
    ))
}

/// Result of one model solve.
#[derive(Clone, Debug)]
pub struct ModelSolution {
    pub x: IndicatorVector,
    /// Objective of the last LP solved.
    pub objective: f64,
    /// LP1 only: `Σ min(x̂_k, x̌_k)`, zero when the split is complementary.
    pub split_gap: f64,
    /// Weighted LPs solved (1 for the unweighted model).
    pub rounds: usize,
    pub lp_iterations: usize,
    /// Final LP basis, for starting a solve of a related system.
    pub basis: WarmStart,
}

/// Builds the LP for `sys` with per-variable weights `w` (length 729).
fn build_lp(sys: &ConstraintSystem, formulation: Formulation, bounded: bool, w: &[f64]) -> LpProblem {
    let m = sys.rows();
    let upper = if bounded { 1.0 } else { f64::INFINITY };
    match formulation {
        Formulation::Lp2 => {
            let a = DenseMatrix::from_row_major(m, VARS, sys.to_f64()).expect("system shape");
            LpProblem::new(w.to_vec(), a, sys.rhs()).with_bounds(vec![0.0; VARS], vec![upper; VARS])
        }
        Formulation::Lp1 => {
            let mut a = DenseMatrix::zeros(m, 2 * VARS);
            for i in 0..m {
                for (j, &v) in sys.row(i).iter().enumerate() {
                    if v != 0 {
                        a.set(i, j, f64::from(v));
                        a.set(i, VARS + j, -f64::from(v));
                    }
                }
            }
            let costs = [w, w].concat();
            LpProblem::new(costs, a, sys.rhs())
                .with_bounds(vec![0.0; 2 * VARS], vec![upper; 2 * VARS])
        }
    }
}

fn costs_for(formulation: Formulation, w: &[f64]) -> Vec<f64> {
    match formulation {
        Formulation::Lp1 => [w, w].concat(),
        Formulation::Lp2 => w.to_vec(),
    }
}

/// Maps an LP point back to `x`, plus the split gap for LP1.
fn recover(formulation: Formulation, point: &[f64]) -> (IndicatorVector, f64) {
    match formulation {
        Formulation::Lp2 => (
            IndicatorVector::from_vec(point.to_vec()).expect("729 LP variables"),
            0.0,
        ),
        Formulation::Lp1 => {
            let (pos, neg) = point.split_at(VARS);
            let x = pos.iter().zip(neg).map(|(p, n)| p - n).collect();
            let gap = pos.iter().zip(neg).map(|(p, n)| p.min(*n).max(0.0)).sum();
            (IndicatorVector::from_vec(x).expect("729 LP variables"), gap)
        }
    }
}

fn run(simplex: &mut Simplex, formulation: Formulation) -> Result<(IndicatorVector, f64, f64, usize)> {
    let sol = simplex.solve();
    match (sol.status, sol.point) {
        (LpStatus::Optimal, Some(point)) => {
            let (x, gap) = recover(formulation, &point);
            Ok((x, sol.objective.unwrap_or(f64::NAN), gap, sol.iterations))
        }
        (status, _) => Err(Error::LpFailed(status)),
    }
}

fn simplex_for(lp: &LpProblem, cfg: &ModelConfig, start: Option<WarmStart>) -> Result<Simplex> {
    match start {
        Some(ws) => Simplex::with_warm_start(lp, cfg.lp, ws),
        None => Simplex::new(lp, cfg.lp),
    }
}

/// Unweighted ℓ1 minimization (`cfg.reweighted` must be false).
pub fn solve_p1(sys: &ConstraintSystem, cfg: &ModelConfig) -> Result<ModelSolution> {
    solve_p1_from(sys, cfg, None)
}

fn solve_p1_from(sys: &ConstraintSystem, cfg: &ModelConfig, start: Option<WarmStart>) -> Result<ModelSolution> {
    if cfg.reweighted {
        return Err(Error::InvalidConfig("solve_p1 called with a reweighted config".into()));
    }
    cfg.validate()?;
    let lp = build_lp(sys, cfg.formulation, cfg.bounded, &[1.0; VARS]);
    let mut simplex = simplex_for(&lp, cfg, start)?;
    let (x, objective, split_gap, lp_iterations) = run(&mut simplex, cfg.formulation)?;
    Ok(ModelSolution {
        x,
        objective,
        split_gap,
        rounds: 1,
        lp_iterations,
        basis: simplex.warm_start(),
    })
}

/// Reweighted ℓ1 minimization (`cfg.reweighted` must be true). Each round
/// re-solves from the previous round's optimal basis.
pub fn solve_wp1(sys: &ConstraintSystem, cfg: &ModelConfig) -> Result<ModelSolution> {
    solve_wp1_from(sys, cfg, None)
}

fn solve_wp1_from(sys: &ConstraintSystem, cfg: &ModelConfig, start: Option<WarmStart>) -> Result<ModelSolution> {
    if !cfg.reweighted {
        return Err(Error::InvalidConfig("solve_wp1 called with an unweighted config".into()));
    }
    cfg.validate()?;
    let mut x_ori = IndicatorVector::zeros();
    let w = reweight(&x_ori, cfg.epsilon)?;
    let lp = build_lp(sys, cfg.formulation, cfg.bounded, w.as_slice());
    let mut simplex = simplex_for(&lp, cfg, start)?;
    let mut lp_iterations = 0;
    let mut last = None;
    for round in 1..=cfg.max_reweight {
        if round > 1 {
            let w = reweight(&x_ori, cfg.epsilon)?;
            simplex.set_costs(&costs_for(cfg.formulation, w.as_slice()))?;
        }
        let (x_new, objective, gap, iters) = run(&mut simplex, cfg.formulation)?;
        lp_iterations += iters;
        let converged = x_new.distance(&x_ori) < cfg.reweight_tol;
        log::trace!("reweight round {round}: objective {objective}, converged {converged}");
        if converged || round == cfg.max_reweight {
            return Ok(ModelSolution {
                x: x_new,
                objective,
                split_gap: gap,
                rounds: round,
                lp_iterations,
                basis: simplex.warm_start(),
            });
        }
        x_ori = x_new.clone();
        last = Some(x_new);
    }
    unreachable!("loop returns on its last round (last = {:?})", last.is_some())
}

/// Dispatches on `cfg.reweighted`.
pub fn solve_model(sys: &ConstraintSystem, cfg: &ModelConfig) -> Result<ModelSolution> {
    solve_model_from(sys, cfg, None)
}

/// [`solve_model`] whose first LP starts from `start`, typically the basis
/// of an earlier solve of a system with fewer rows.
pub fn solve_model_from(sys: &ConstraintSystem, cfg: &ModelConfig, start: Option<WarmStart>) -> Result<ModelSolution> {
    if cfg.reweighted {
        solve_wp1_from(sys, cfg, start)
    } else {
        solve_p1_from(sys, cfg, start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{build_system, grid_to_indicator, round_to_grid};
    use crate::grid::fixtures::figure1;
    use crate::grid::{validate, Grid};

    #[test]
    fn reweight_examples() {
        let w = reweight(&IndicatorVector::zeros(), 0.5).unwrap();
        assert!(w.as_slice().iter().all(|&v| v == 2.0));

        let mut x = vec![0.0; VARS];
        x[3] = 1.0;
        x[4] = -1.0;
        let x = IndicatorVector::from_vec(x).unwrap();
        let w = reweight(&x, 1.0).unwrap();
        assert_eq!(w.as_slice()[3], 0.5);
        assert_eq!(w.as_slice()[4], 0.5);
        assert_eq!(w.as_slice()[0], 1.0);

        let w = reweight(&x, 30.0).unwrap();
        assert!(w.as_slice().iter().all(|&v| (1.0 / 31.0..=1.0 / 30.0).contains(&v)));

        assert!(reweight(&x, 0.0).is_err());
        assert!(reweight(&x, -1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ModelConfig::wp1(Formulation::Lp1, false, 30.0).validate().is_ok());
        assert!(ModelConfig::wp1(Formulation::Lp1, false, 0.0).validate().is_err());
        let mut c = ModelConfig::p1(Formulation::Lp2, true);
        c.max_reweight = 0;
        assert!(c.validate().is_err());
        assert_eq!(ModelConfig::wp1(Formulation::Lp2, true, 1.0).method_label(), "(Weighted LP2)");
    }

    #[test]
    fn wrong_mode_is_rejected() {
        let (p, _) = figure1();
        let sys = build_system(&p).unwrap();
        assert!(solve_p1(&sys, &ModelConfig::wp1(Formulation::Lp2, false, 1.0)).is_err());
        assert!(solve_wp1(&sys, &ModelConfig::p1(Formulation::Lp2, false)).is_err());
    }

    #[test]
    fn lp2_objective_is_81() {
        let (p, s) = figure1();
        let sys = build_system(&p).unwrap();
        for bounded in [false, true] {
            let sol = solve_p1(&sys, &ModelConfig::p1(Formulation::Lp2, bounded)).unwrap();
            assert!((sol.objective - 81.0).abs() < 1e-6);
            assert!(sys.residual(sol.x.as_slice()) <= 1e-9);
            let g = round_to_grid(&sol.x);
            assert!(g.extends(&p));
            if validate(&g).is_solved() {
                assert_eq!(g, s);
            }
        }
    }

    #[test]
    fn lp1_split_is_complementary() {
        let (p, s) = figure1();
        let sys = build_system(&p).unwrap();
        let z = grid_to_indicator(&s).unwrap();
        for bounded in [false, true] {
            let sol = solve_p1(&sys, &ModelConfig::p1(Formulation::Lp1, bounded)).unwrap();
            assert!(sol.split_gap <= 1e-7);
            assert!(sys.residual(sol.x.as_slice()) <= 1e-9);
            assert!((sol.objective - sol.x.l1_norm()).abs() <= 1e-7);
            // The known solution is feasible with ℓ1 norm 81.
            assert!(sol.objective <= z.l1_norm() + 1e-9);
        }
    }

    #[test]
    fn complete_grid_pins_the_vector() {
        let (_, s) = figure1();
        let sys = build_system(&s).unwrap();
        for f in [Formulation::Lp1, Formulation::Lp2] {
            let sol = solve_p1(&sys, &ModelConfig::p1(f, false)).unwrap();
            assert_eq!(round_to_grid(&sol.x), s);
        }
    }

    #[test]
    fn binary_p1_solution_is_a_reweighting_fixed_point() {
        // With one blank per row, each row constraint for the missing digit
        // can only be met in the blank cell, so the feasible set is a single
        // binary point and the first round already lands on it.
        let (_, s) = figure1();
        let mut p = s;
        for r in 0..9 {
            p.clear(9 * r + r);
        }
        let sys = build_system(&p).unwrap();
        let p1 = solve_p1(&sys, &ModelConfig::p1(Formulation::Lp2, false)).unwrap();
        assert!(p1.x.distance(&grid_to_indicator(&s).unwrap()) < 1e-9);
        let sol = solve_wp1(&sys, &ModelConfig::wp1(Formulation::Lp2, false, 0.5)).unwrap();
        assert_eq!(sol.rounds, 2);
        assert!(sol.x.distance(&p1.x) < 1e-9);
        // Weighted cost of the binary point: 81 ones at weight 1/(1 + ε).
        assert!((sol.objective - 81.0 / 1.5).abs() < 1e-9);
    }

    #[test]
    fn single_round_equals_uniform_weighted_solve() {
        let (p, _) = figure1();
        let sys = build_system(&p).unwrap();
        for f in [Formulation::Lp1, Formulation::Lp2] {
            let mut cfg = ModelConfig::wp1(f, false, 0.5);
            cfg.max_reweight = 1;
            let one = solve_wp1(&sys, &cfg).unwrap();
            assert_eq!(one.rounds, 1);
            let lp = build_lp(&sys, f, false, WeightVector::uniform(2.0).as_slice());
            let direct = crate::lp::solve_lp(&lp, &LpOptions::default()).unwrap();
            let (x, _) = recover(f, direct.point.as_ref().unwrap());
            assert_eq!(one.x, x);
            // Uniform weights decode like the unweighted model.
            let p1 = solve_p1(&sys, &ModelConfig::p1(f, false)).unwrap();
            assert_eq!(round_to_grid(&one.x), round_to_grid(&p1.x));
        }
    }

    #[test]
    fn contradictory_system_fails() {
        // Every digit asserted in cell 0 contradicts its cell row over the reals.
        let (p, _) = figure1();
        let mut sys = build_system(&p).unwrap();
        for d in 1..=9 {
            sys = sys.with_assignment_row(0, d);
        }
        for f in [Formulation::Lp1, Formulation::Lp2] {
            for bounded in [false, true] {
                let res = solve_p1(&sys, &ModelConfig::p1(f, bounded));
                assert!(matches!(res, Err(Error::LpFailed(LpStatus::Infeasible))), "{f:?}/{bounded}");
            }
        }
    }

    #[test]
    fn hidden_contradiction_is_infeasible_for_nonnegative_x() {
        // Row 0 can only take its 9 in cell 8, but column 8 already has one.
        let mut p = Grid::empty();
        for (k, d) in (1..=8).enumerate() {
            p.set(k, d);
        }
        p.set(9 * 4 + 8, 9);
        let sys = build_system(&p).unwrap();
        for bounded in [false, true] {
            let res = solve_p1(&sys, &ModelConfig::p1(Formulation::Lp2, bounded));
            assert!(matches!(res, Err(Error::LpFailed(LpStatus::Infeasible))));
        }
    }
}
