//! Helpers shared by the integration tests: a brute-force LP oracle, a
//! random small-LP generator and dataset lookup.

#![allow(dead_code)]

use std::path::PathBuf;

use l1sudoku::lp::{DenseMatrix, LpProblem};
use rand::Rng;

/// What enumeration says about `min cᵀy, E y = f, l ≤ y ≤ u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Brute {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

const TOL: f64 = 1e-9;

/// Solves `M z = g` by Gaussian elimination with partial pivoting. Returns
/// `None` when the columns of `M` are dependent or the system is
/// inconsistent.
fn solve_exact(m: &[Vec<f64>], g: &[f64]) -> Option<Vec<f64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<f64>> = m.iter().zip(g).map(|(r, &b)| {
        let mut r = r.clone();
        r.push(b);
        r
    }).collect();
    let mut pivots = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let best = (r..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[best][c].abs() < TOL {
            return None;
        }
        a.swap(r, best);
        for i in 0..rows {
            if i != r && a[i][c] != 0.0 {
                let f = a[i][c] / a[r][c];
                for k in c..=cols {
                    a[i][k] -= f * a[r][k];
                }
            }
        }
        pivots.push(r);
        r += 1;
    }
    // Leftover rows must read 0 = 0.
    if a[r..].iter().any(|row| row[cols].abs() > 1e-7) {
        return None;
    }
    Some((0..cols).map(|c| a[pivots[c]][cols] / a[pivots[c]][c]).collect())
}

/// Every basic feasible point of `{E y = f, l ≤ y ≤ u}`: each variable is
/// pinned at a finite bound or left free, the free columns must determine
/// the rest uniquely.
pub fn vertices(e: &[Vec<f64>], f: &[f64], lower: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
    let n = lower.len();
    let mut out = Vec::new();
    let mut state = vec![0u8; n];
    loop {
        let skip = state.iter().zip(upper).any(|(&s, u)| s == 2 && !u.is_finite());
        let free: Vec<usize> = (0..n).filter(|&j| state[j] == 0).collect();
        if !skip && free.len() <= f.len().max(0) {
            let mut y = vec![0.0; n];
            for j in 0..n {
                y[j] = match state[j] {
                    1 => lower[j],
                    2 => upper[j],
                    _ => 0.0,
                };
            }
            let rhs: Vec<f64> = (0..f.len())
                .map(|i| f[i] - (0..n).map(|j| e[i][j] * y[j]).sum::<f64>())
                .collect();
            let sub: Vec<Vec<f64>> = e.iter().map(|row| free.iter().map(|&j| row[j]).collect()).collect();
            let solved = if free.is_empty() {
                rhs.iter().all(|v| v.abs() <= 1e-7).then(Vec::new)
            } else {
                solve_exact(&sub, &rhs)
            };
            if let Some(z) = solved {
                for (&j, v) in free.iter().zip(z) {
                    y[j] = v;
                }
                let inside = (0..n).all(|j| y[j] >= lower[j] - 1e-7 && y[j] <= upper[j] + 1e-7);
                if inside {
                    out.push(y);
                }
            }
        }
        // Next assignment in base 3.
        let mut k = 0;
        while k < n && state[k] == 2 {
            state[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        state[k] += 1;
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Brute-force answer for a problem with finite lower bounds.
pub fn brute_force(p: &LpProblem) -> Brute {
    let n = p.num_vars();
    let m = p.num_constraints();
    let e: Vec<Vec<f64>> = (0..m).map(|i| p.eq_matrix.row(i).to_vec()).collect();
    let points = vertices(&e, &p.rhs, &p.lower, &p.upper);
    if points.is_empty() {
        return Brute::Infeasible;
    }
    // Recession directions live on the variables without an upper bound;
    // normalizing 1ᵀd = 1 turns the cone into a polytope whose vertices are
    // the extreme rays.
    let open: Vec<usize> = (0..n).filter(|&j| !p.upper[j].is_finite()).collect();
    if !open.is_empty() {
        let mut re: Vec<Vec<f64>> = e.iter().map(|row| open.iter().map(|&j| row[j]).collect()).collect();
        re.push(vec![1.0; open.len()]);
        let mut rf = vec![0.0; m];
        rf.push(1.0);
        let k = open.len();
        let costs: Vec<f64> = open.iter().map(|&j| p.costs[j]).collect();
        let rays = vertices(&re, &rf, &vec![0.0; k], &vec![f64::INFINITY; k]);
        if rays.iter().any(|d| dot(&costs, d) < -1e-9) {
            return Brute::Unbounded;
        }
    }
    let best = points.iter().map(|y| dot(&p.costs, y)).fold(f64::INFINITY, f64::min);
    Brute::Optimal(best)
}

/// A random LP with integer data: up to 8 variables and 6 equalities,
/// finite lower bounds (some nonzero), upper bounds finite or absent, and a
/// right-hand side that is feasible by construction about two times in
/// three.
pub fn random_small_lp<R: Rng>(rng: &mut R) -> LpProblem {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=6);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect())
        .collect();
    let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(-4i32..=4) as f64).collect();
    let lower: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.7) { 0.0 } else { rng.gen_range(-2i32..=2) as f64 })
        .collect();
    let upper: Vec<f64> = lower
        .iter()
        .map(|&l| if rng.gen_bool(0.5) { f64::INFINITY } else { l + rng.gen_range(1i32..=3) as f64 })
        .collect();
    let mat = DenseMatrix::from_rows(&rows).unwrap();
    let rhs = if rng.gen_bool(2.0 / 3.0) {
        let y0: Vec<f64> = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| {
                let span = if u.is_finite() { u - l } else { 3.0 };
                l + (rng.gen_range(0..=4) as f64) * span / 4.0
            })
            .collect();
        mat.mul(&y0)
    } else {
        (0..m).map(|_| rng.gen_range(-6i32..=6) as f64).collect()
    };
    LpProblem::new(costs, mat, rhs).with_bounds(lower, upper)
}

/// The puzzle corpus: `L1SUDOKU_DATASET` when set, else the bundled file.
pub fn dataset_path() -> PathBuf {
    match std::env::var_os("L1SUDOKU_DATASET") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sudoku17.txt"),
    }
}
