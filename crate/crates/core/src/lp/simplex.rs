//! Two-phase bounded-variable primal simplex.
//!
//! Phase 1 starts from an all-artificial basis (one artificial per row,
//! signed so it starts nonnegative) with every structural at its lower
//! bound. Artificials that leave the basis are fixed at zero. After phase 1
//! the remaining basic artificials are pivoted out where the row allows it;
//! the rest sit on redundant rows and stay basic, frozen at zero.
//!
//! Reduced costs are updated from the pivot row after every basis change and
//! recomputed from scratch at each refactorization and before optimality is
//! declared. Pricing picks the largest one (Dantzig) or the largest relative
//! to a devex reference weight. After `3·(m + n)` degenerate pivots, Bland's
//! rule takes over for the rest of the solve. The ratio test is a two-pass Harris test outside Bland mode.
//!
//! A solve can also start from the basis of a related problem over the same
//! variables (see [`WarmStart`]). The old basic structurals are kept, pivoted
//! on rows the old point still satisfies, and every other row gets an
//! artificial; phase 1 then only has to remove the residual of the rows the
//! old point violates.

use log::trace;

use super::lu::{independent_rows, BasisFactor, Singular};
use super::{LpOptions, LpProblem, LpSolution, LpStatus, Pricing};
use crate::error::{Error, Result};

const REFACTOR_EVERY: usize = 50;
const SPOT_CHECK_EVERY: usize = 10;
const DRIFT_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;
const DRIVE_OUT_TOL: f64 = 1e-7;
const DEGENERATE_STEP: f64 = 1e-12;
/// Relative slack under which two pricing scores count as tied.
const PRICE_TIE: f64 = 1e-9;
/// Devex weights are reset to one when any grows past this.
const WEIGHT_RESET: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, PartialEq, Eq)]
enum RunEnd {
    Optimal,
    Unbounded,
    IterationLimit,
    Restart,
}

/// The final basis of a solve, reusable as the starting point of a problem
/// with the same variables and possibly different rows.
#[derive(Clone, Debug, PartialEq)]
pub struct WarmStart {
    /// Basic structural variables.
    basic: Vec<usize>,
    /// Structural values.
    point: Vec<f64>,
}

/// A reusable solver instance. Construct once, call [`Simplex::solve`],
/// then optionally [`Simplex::set_costs`] and solve again: the previous
/// optimal basis stays primal feasible, so the re-solve skips phase 1.
#[derive(Debug)]
pub struct Simplex {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
    costs: Vec<f64>,
    /// Bounds for structurals then artificials.
    lo: Vec<f64>,
    hi: Vec<f64>,
    art_sign: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    factor: BasisFactor,
    opts: LpOptions,
    feasible_basis: bool,
    bland: bool,
    degenerate: usize,
    iterations: usize,
    restarts: usize,
    col: Vec<f64>,
    duals: Vec<f64>,
    /// Row-wise copy of the structural columns.
    row_start: Vec<usize>,
    col_idx: Vec<usize>,
    row_vals: Vec<f64>,
    /// Reduced costs of the current phase.
    d: Vec<f64>,
    /// Set by a full recomputation of `d`, cleared by the next pivot.
    d_fresh: bool,
    weights: Vec<f64>,
    rho: Vec<f64>,
    alpha_row: Vec<f64>,
    in_row: Vec<bool>,
    touched: Vec<usize>,
    start: Option<WarmStart>,
}

impl Simplex {
    pub fn new(p: &LpProblem, opts: LpOptions) -> Result<Self> {
        p.validate()?;
        let (m, n) = (p.num_constraints(), p.num_vars());
        let mut col_start = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_start.push(0);
        for j in 0..n {
            for i in 0..m {
                let a = p.eq_matrix.get(i, j);
                if a != 0.0 {
                    row_idx.push(i);
                    vals.push(a);
                }
            }
            col_start.push(row_idx.len());
        }
        let mut row_start = vec![0usize; m + 1];
        for &i in &row_idx {
            row_start[i + 1] += 1;
        }
        for i in 0..m {
            row_start[i + 1] += row_start[i];
        }
        let mut fill = row_start.clone();
        let mut col_idx = vec![0usize; row_idx.len()];
        let mut row_vals = vec![0.0; row_idx.len()];
        for j in 0..n {
            for t in col_start[j]..col_start[j + 1] {
                let i = row_idx[t];
                col_idx[fill[i]] = j;
                row_vals[fill[i]] = vals[t];
                fill[i] += 1;
            }
        }
        let mut lo = p.lower.clone();
        let mut hi = p.upper.clone();
        lo.resize(n + m, 0.0);
        hi.resize(n + m, f64::INFINITY);
        Ok(Simplex {
            m,
            n,
            col_start,
            row_idx,
            vals,
            rhs: p.rhs.clone(),
            costs: p.costs.clone(),
            lo,
            hi,
            art_sign: vec![1.0; m],
            x: vec![0.0; n + m],
            state: vec![VarState::Lower; n + m],
            basis: Vec::new(),
            factor: BasisFactor::default(),
            opts,
            feasible_basis: false,
            bland: false,
            degenerate: 0,
            iterations: 0,
            restarts: 0,
            col: vec![0.0; m],
            duals: vec![0.0; m],
            row_start,
            col_idx,
            row_vals,
            d: vec![0.0; n + m],
            d_fresh: false,
            weights: vec![1.0; n + m],
            rho: vec![0.0; m],
            alpha_row: vec![0.0; n + m],
            in_row: vec![false; n + m],
            touched: Vec::new(),
            start: None,
        })
    }

    /// Like [`Simplex::new`], but the first solve starts from `start` when
    /// it fits this problem and from the all-artificial basis otherwise.
    pub fn with_warm_start(p: &LpProblem, opts: LpOptions, start: WarmStart) -> Result<Self> {
        let mut s = Simplex::new(p, opts)?;
        if start.point.len() == s.n && start.basic.iter().all(|&j| j < s.n) {
            s.start = Some(start);
        }
        Ok(s)
    }

    /// The current basis, meaningful after an optimal solve.
    pub fn warm_start(&self) -> WarmStart {
        WarmStart {
            basic: self.basis.iter().copied().filter(|&j| j < self.n).collect(),
            point: self.x[..self.n].to_vec(),
        }
    }

    /// Replaces the objective, keeping the current basis for a warm start.
    pub fn set_costs(&mut self, costs: &[f64]) -> Result<()> {
        if costs.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} costs, got {}",
                self.n,
                costs.len()
            )));
        }
        if costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite cost".into()));
        }
        self.costs.copy_from_slice(costs);
        Ok(())
    }

    pub fn solve(&mut self) -> LpSolution {
        let limit = self.opts.max_iters.unwrap_or(20 * (self.m + self.n));
        self.iterations = 0;
        self.degenerate = 0;
        self.bland = false;
        self.restarts = 0;
        loop {
            match self.solve_once(limit) {
                Some(sol) => return sol,
                None => {
                    // A singular basis could not be repaired in place.
                    self.restarts += 1;
                    self.feasible_basis = false;
                    self.bland = true;
                    if self.restarts > 2 {
                        return self.finish(LpStatus::IterationLimit);
                    }
                }
            }
        }
    }

    fn solve_once(&mut self, limit: usize) -> Option<LpSolution> {
        if !self.feasible_basis {
            let warm = self.start.take().map_or(false, |ws| self.init_warm(&ws));
            if !warm {
                self.init_cold();
            }
            match self.run(Phase::One, limit) {
                RunEnd::Optimal => {}
                RunEnd::IterationLimit => return Some(self.finish(LpStatus::IterationLimit)),
                RunEnd::Restart => return None,
                RunEnd::Unbounded => unreachable!("phase 1 objective is bounded below"),
            }
            let infeasibility: f64 = (self.n..self.n + self.m).map(|j| self.x[j].abs()).sum();
            if infeasibility > self.m.max(1) as f64 * self.opts.feas_tol {
                return Some(self.finish(LpStatus::Infeasible));
            }
            if !self.drive_out_artificials() {
                return None;
            }
            log::debug!(
                "phase 1 done after {} iterations ({} degenerate)",
                self.iterations,
                self.degenerate
            );
            self.feasible_basis = true;
        }
        let status = match self.run(Phase::Two, limit) {
            RunEnd::Optimal => LpStatus::Optimal,
            RunEnd::Unbounded => LpStatus::Unbounded,
            RunEnd::IterationLimit => LpStatus::IterationLimit,
            RunEnd::Restart => return None,
        };
        log::debug!(
            "{status:?} after {} iterations ({} degenerate)",
            self.iterations,
            self.degenerate
        );
        Some(self.finish(status))
    }

    fn finish(&mut self, status: LpStatus) -> LpSolution {
        if status != LpStatus::Optimal {
            return LpSolution {
                status,
                point: None,
                objective: None,
                iterations: self.iterations,
            };
        }
        if self.factor.updates() > 0 && !self.refactor() {
            self.feasible_basis = false;
            return LpSolution {
                status: LpStatus::IterationLimit,
                point: None,
                objective: None,
                iterations: self.iterations,
            };
        }
        let point = self.x[..self.n].to_vec();
        let objective = self.costs.iter().zip(&point).map(|(c, v)| c * v).sum();
        LpSolution {
            status,
            point: Some(point),
            objective: Some(objective),
            iterations: self.iterations,
        }
    }

    fn init_cold(&mut self) {
        let (m, n) = (self.m, self.n);
        for j in 0..n {
            self.x[j] = self.lo[j];
            self.state[j] = VarState::Lower;
        }
        let mut resid = self.rhs.clone();
        for j in 0..n {
            let v = self.x[j];
            if v != 0.0 {
                for t in self.col_start[j]..self.col_start[j + 1] {
                    resid[self.row_idx[t]] -= self.vals[t] * v;
                }
            }
        }
        self.basis.clear();
        for i in 0..m {
            let a = n + i;
            self.art_sign[i] = if resid[i] < 0.0 { -1.0 } else { 1.0 };
            self.lo[a] = 0.0;
            self.hi[a] = f64::INFINITY;
            self.x[a] = resid[i].abs();
            self.state[a] = VarState::Basic(i);
            self.basis.push(a);
        }
        let ok = self.refactor();
        debug_assert!(ok, "artificial basis is diagonal");
    }

    /// Sets up the basis described by `ws`. Returns `false`, leaving the
    /// state for [`Simplex::init_cold`] to overwrite, when it cannot be used.
    fn init_warm(&mut self, ws: &WarmStart) -> bool {
        let (m, n) = (self.m, self.n);
        let tol = self.opts.feas_tol;
        let mut is_basic = vec![false; n];
        for &j in &ws.basic {
            is_basic[j] = true;
        }
        for j in 0..n {
            let v = ws.point[j];
            if is_basic[j] {
                self.x[j] = v;
            } else if self.hi[j].is_finite() && (self.hi[j] - v).abs() < (v - self.lo[j]).abs() {
                self.x[j] = self.hi[j];
                self.state[j] = VarState::Upper;
            } else {
                self.x[j] = self.lo[j];
                self.state[j] = VarState::Lower;
            }
        }
        let mut resid = self.rhs.clone();
        for j in 0..n {
            let v = self.x[j];
            if v != 0.0 {
                for t in self.col_start[j]..self.col_start[j + 1] {
                    resid[self.row_idx[t]] -= self.vals[t] * v;
                }
            }
        }
        let satisfied: Vec<bool> = resid.iter().map(|r| r.abs() <= tol).collect();
        let columns: Vec<Vec<(usize, f64)>> = ws
            .basic
            .iter()
            .map(|&j| (self.col_start[j]..self.col_start[j + 1]).map(|t| (self.row_idx[t], self.vals[t])).collect())
            .collect();
        let Some(rows) = independent_rows(m, &columns, &satisfied) else {
            return false;
        };
        let mut covered = vec![false; m];
        for &i in &rows {
            covered[i] = true;
        }
        self.basis.clear();
        for &j in &ws.basic {
            self.state[j] = VarState::Basic(self.basis.len());
            self.basis.push(j);
        }
        for i in 0..m {
            let a = n + i;
            self.art_sign[i] = if resid[i] < 0.0 { -1.0 } else { 1.0 };
            self.lo[a] = 0.0;
            self.x[a] = 0.0;
            if covered[i] {
                self.hi[a] = 0.0;
                self.state[a] = VarState::Lower;
            } else {
                // Rows the old point satisfies keep their artificial at zero.
                self.hi[a] = if satisfied[i] { 0.0 } else { f64::INFINITY };
                self.state[a] = VarState::Basic(self.basis.len());
                self.basis.push(a);
            }
        }
        let ok = self.refactor();
        if !ok {
            trace!("warm start rejected, starting cold");
        }
        ok
    }

    #[inline]
    fn cost(&self, phase: Phase, j: usize) -> f64 {
        match (phase, j < self.n) {
            (Phase::One, true) => 0.0,
            (Phase::One, false) => 1.0,
            (Phase::Two, true) => self.costs[j],
            (Phase::Two, false) => 0.0,
        }
    }

    fn for_each_entry(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for t in self.col_start[j]..self.col_start[j + 1] {
                f(self.row_idx[t], self.vals[t]);
            }
        } else {
            let i = j - self.n;
            f(i, self.art_sign[i]);
        }
    }

    /// Column `j` of `[E, diag(σ)]` dotted with a row-indexed vector.
    #[inline]
    fn dot_column(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let mut s = 0.0;
            for t in self.col_start[j]..self.col_start[j + 1] {
                s += self.vals[t] * y[self.row_idx[t]];
            }
            s
        } else {
            let i = j - self.n;
            self.art_sign[i] * y[i]
        }
    }

    fn load_column(&mut self, j: usize) {
        let mut col = std::mem::take(&mut self.col);
        col.iter_mut().for_each(|v| *v = 0.0);
        self.for_each_entry(j, |i, a| col[i] = a);
        self.factor.ftran(&mut col);
        self.col = col;
    }

    /// Refactorizes the basis and recomputes basic values. Returns `false`
    /// when a singular basis was repaired into a primal-infeasible one.
    fn refactor(&mut self) -> bool {
        loop {
            let basis = &self.basis;
            let (n, col_start, row_idx, vals, sign) =
                (self.n, &self.col_start, &self.row_idx, &self.vals, &self.art_sign);
            let res = self.factor.refactor(self.m, |k, out| {
                let j = basis[k];
                if j < n {
                    for t in col_start[j]..col_start[j + 1] {
                        out.push((row_idx[t], vals[t]));
                    }
                } else {
                    out.push((j - n, sign[j - n]));
                }
            });
            match res {
                Ok(()) => break,
                Err(Singular { position, free_rows }) => {
                    let row = free_rows
                        .into_iter()
                        .find(|&r| !matches!(self.state[self.n + r], VarState::Basic(_)))
                        .expect("a free row's artificial cannot be basic");
                    let out = self.basis[position];
                    trace!("singular basis at position {position}: replacing {out} by artificial {row}");
                    let (l, h) = (self.lo[out], self.hi[out]);
                    let v = self.x[out];
                    if h.is_finite() && (h - v) < (v - l) {
                        self.x[out] = h;
                        self.state[out] = VarState::Upper;
                    } else {
                        self.x[out] = l;
                        self.state[out] = VarState::Lower;
                    }
                    let a = self.n + row;
                    self.basis[position] = a;
                    self.state[a] = VarState::Basic(position);
                }
            }
        }
        self.recompute_basics();
        let tol = self.opts.feas_tol;
        self.basis
            .iter()
            .all(|&j| self.x[j] >= self.lo[j] - tol && self.x[j] <= self.hi[j] + tol)
    }

    fn recompute_basics(&mut self) {
        let mut v = self.rhs.clone();
        for j in 0..self.n + self.m {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                self.for_each_entry(j, |i, a| v[i] -= a * xj);
            }
        }
        self.factor.ftran(&mut v);
        for (k, &j) in self.basis.iter().enumerate() {
            self.x[j] = v[k];
        }
    }

    fn primal_drift(&self) -> f64 {
        let mut r = self.rhs.clone();
        for j in 0..self.n + self.m {
            let xj = self.x[j];
            if xj != 0.0 {
                self.for_each_entry(j, |i, a| r[i] -= a * xj);
            }
        }
        r.into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    /// Recomputes every reduced cost from fresh duals.
    fn reset_reduced_costs(&mut self, phase: Phase) {
        let mut y = std::mem::take(&mut self.duals);
        for (k, &j) in self.basis.iter().enumerate() {
            y[k] = self.cost(phase, j);
        }
        self.factor.btran(&mut y);
        for j in 0..self.n + self.m {
            self.d[j] = if matches!(self.state[j], VarState::Basic(_)) {
                0.0
            } else {
                self.cost(phase, j) - self.dot_column(j, &y)
            };
        }
        self.duals = y;
        self.d_fresh = true;
    }

    /// Entering variable, or `None` when no reduced cost is attractive.
    fn price(&self) -> Option<usize> {
        let tol = self.opts.cost_tol;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.n + self.m {
            let d = self.d[j];
            let attractive = match self.state[j] {
                VarState::Lower => d < -tol,
                VarState::Upper => d > tol,
                VarState::Basic(_) => false,
            };
            if !attractive || self.lo[j] == self.hi[j] {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            let score = match self.opts.pricing {
                Pricing::Dantzig => d * d,
                Pricing::Devex => d * d / self.weights[j],
            };
            if best.map_or(true, |(_, b)| score > b * (1.0 + PRICE_TIE)) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Row `r` of `B⁻¹[E, diag(σ)]` into `alpha_row`, nonzeros listed in
    /// `touched`.
    fn compute_pivot_row(&mut self, r: usize) {
        for &j in &self.touched {
            self.alpha_row[j] = 0.0;
            self.in_row[j] = false;
        }
        self.touched.clear();
        let mut rho = std::mem::take(&mut self.rho);
        rho.iter_mut().for_each(|v| *v = 0.0);
        rho[r] = 1.0;
        self.factor.btran(&mut rho);
        for (i, &ri) in rho.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for t in self.row_start[i]..self.row_start[i + 1] {
                let j = self.col_idx[t];
                if !self.in_row[j] {
                    self.in_row[j] = true;
                    self.touched.push(j);
                }
                self.alpha_row[j] += ri * self.row_vals[t];
            }
            let a = self.n + i;
            self.in_row[a] = true;
            self.touched.push(a);
            self.alpha_row[a] = self.art_sign[i] * ri;
        }
        self.rho = rho;
    }

    /// Reduced-cost and devex-weight updates for `q` replacing position `r`.
    fn update_pricing(&mut self, q: usize, r: usize) {
        self.compute_pivot_row(r);
        let arq = self.col[r];
        let theta_d = self.d[q] / arq;
        let devex = self.opts.pricing == Pricing::Devex;
        let wq = self.weights[q];
        let mut reset = false;
        for &j in &self.touched {
            if j == q || matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let a = self.alpha_row[j];
            if a == 0.0 {
                continue;
            }
            self.d[j] -= theta_d * a;
            if !devex {
                continue;
            }
            let ratio = a / arq;
            let w = self.weights[j].max(ratio * ratio * wq);
            reset |= w > WEIGHT_RESET;
            self.weights[j] = w;
        }
        let out = self.basis[r];
        self.d[out] = -theta_d;
        if devex {
            self.weights[out] = (wq / (arq * arq)).max(1.0);
        }
        self.d[q] = 0.0;
        if reset {
            self.weights.iter_mut().for_each(|w| *w = 1.0);
        }
        self.d_fresh = false;
    }

    /// Ratio test for entering `q` moving in direction `dir`. Returns the
    /// step and the leaving basis position (`None` for a bound flip), or
    /// `None` if the step is unbounded.
    fn ratio_test(&self, q: usize, dir: f64) -> Option<(f64, Option<usize>)> {
        let flip = self.hi[q] - self.lo[q];
        let harris = 0.5 * self.opts.feas_tol;
        let ratio = |k: usize, slack: f64| -> Option<f64> {
            let a = dir * self.col[k];
            if a.abs() <= PIVOT_TOL {
                return None;
            }
            let j = self.basis[k];
            if a > 0.0 {
                Some(((self.x[j] - self.lo[j] + slack) / a).max(0.0))
            } else if self.hi[j].is_finite() {
                Some(((self.hi[j] - self.x[j] + slack) / -a).max(0.0))
            } else {
                None
            }
        };

        let mut leave: Option<(usize, f64)> = None;
        if self.bland {
            for k in 0..self.m {
                let Some(t) = ratio(k, 0.0) else { continue };
                leave = match leave {
                    None => Some((k, t)),
                    Some((kb, tb)) => {
                        if t < tb - DEGENERATE_STEP
                            || (t <= tb + DEGENERATE_STEP && self.basis[k] < self.basis[kb])
                        {
                            Some((k, t.min(tb)))
                        } else {
                            Some((kb, tb))
                        }
                    }
                };
            }
        } else {
            let mut bound = f64::INFINITY;
            for k in 0..self.m {
                if let Some(t) = ratio(k, harris) {
                    bound = bound.min(t);
                }
            }
            if bound.is_finite() {
                let mut best_pivot = 0.0;
                for k in 0..self.m {
                    let Some(t) = ratio(k, 0.0) else { continue };
                    if t <= bound && self.col[k].abs() > best_pivot {
                        best_pivot = self.col[k].abs();
                        leave = Some((k, t));
                    }
                }
            }
        }

        match leave {
            Some((_, t)) if flip <= t => Some((flip, None)),
            Some((k, t)) => Some((t, Some(k))),
            None if flip.is_finite() => Some((flip, None)),
            None => None,
        }
    }

    fn run(&mut self, phase: Phase, limit: usize) -> RunEnd {
        let switch_after = 3 * (self.m + self.n);
        self.weights.iter_mut().for_each(|w| *w = 1.0);
        self.reset_reduced_costs(phase);
        loop {
            if self.factor.updates() >= REFACTOR_EVERY
                || (self.iterations % SPOT_CHECK_EVERY == 0
                    && self.factor.updates() > 0
                    && self.primal_drift() > DRIFT_TOL)
            {
                if !self.refactor() {
                    return RunEnd::Restart;
                }
                self.reset_reduced_costs(phase);
            }
            let Some(q) = self.price() else {
                if self.d_fresh {
                    return RunEnd::Optimal;
                }
                self.reset_reduced_costs(phase);
                continue;
            };
            if self.iterations >= limit {
                return RunEnd::IterationLimit;
            }
            self.iterations += 1;

            let dir = if self.state[q] == VarState::Upper { -1.0 } else { 1.0 };
            self.load_column(q);
            let Some((theta, leaving)) = self.ratio_test(q, dir) else {
                return RunEnd::Unbounded;
            };
            if self.opts.trace {
                trace!(
                    "{phase:?} it {} enter {q} dir {dir} step {theta:e} leave {:?}",
                    self.iterations,
                    leaving.map(|k| self.basis[k])
                );
            }
            if theta <= DEGENERATE_STEP {
                self.degenerate += 1;
                if !self.bland && self.degenerate > switch_after {
                    trace!("switching to Bland's rule after {} degenerate pivots", self.degenerate);
                    self.bland = true;
                }
            }

            let step = dir * theta;
            for k in 0..self.m {
                let a = self.col[k];
                if a != 0.0 {
                    self.x[self.basis[k]] -= step * a;
                }
            }
            match leaving {
                None => {
                    if dir > 0.0 {
                        self.x[q] = self.hi[q];
                        self.state[q] = VarState::Upper;
                    } else {
                        self.x[q] = self.lo[q];
                        self.state[q] = VarState::Lower;
                    }
                }
                Some(r) => {
                    self.update_pricing(q, r);
                    self.x[q] += step;
                    let out = self.basis[r];
                    let to_lower = dir * self.col[r] > 0.0;
                    if to_lower {
                        self.x[out] = self.lo[out];
                        self.state[out] = VarState::Lower;
                    } else {
                        self.x[out] = self.hi[out];
                        self.state[out] = VarState::Upper;
                    }
                    if out >= self.n {
                        // Artificials never re-enter.
                        self.hi[out] = self.lo[out];
                        self.x[out] = self.lo[out];
                        self.state[out] = VarState::Lower;
                    }
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic(r);
                    let col = std::mem::take(&mut self.col);
                    self.factor.push_update(r, &col);
                    self.col = col;
                }
            }
        }
    }

    /// Pivots basic artificials out where possible and freezes every
    /// artificial at zero.
    fn drive_out_artificials(&mut self) -> bool {
        let (m, n) = (self.m, self.n);
        for a in n..n + m {
            self.hi[a] = 0.0;
            self.lo[a] = 0.0;
        }
        let mut rho = vec![0.0; m];
        for r in 0..m {
            if self.basis[r] < n {
                continue;
            }
            if self.factor.updates() >= REFACTOR_EVERY && !self.refactor() {
                return false;
            }
            rho.iter_mut().for_each(|v| *v = 0.0);
            rho[r] = 1.0;
            self.factor.btran(&mut rho);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if matches!(self.state[j], VarState::Basic(_)) || self.lo[j] == self.hi[j] {
                    continue;
                }
                let a = self.dot_column(j, &rho).abs();
                if a > DRIVE_OUT_TOL && best.map_or(true, |(_, b)| a > b * (1.0 + PRICE_TIE)) {
                    best = Some((j, a));
                }
            }
            let Some((q, _)) = best else { continue };
            self.load_column(q);
            let out = self.basis[r];
            self.x[out] = 0.0;
            self.state[out] = VarState::Lower;
            self.basis[r] = q;
            self.state[q] = VarState::Basic(r);
            let col = std::mem::take(&mut self.col);
            self.factor.push_update(r, &col);
            self.col = col;
        }
        self.refactor()
    }
}
