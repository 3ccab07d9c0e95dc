//! Dense LU factorization with partial (row) pivoting for simplex bases,
//! plus a product-form eta file for the updates between refactorizations.
//!
//! Columns are eliminated sparsest first. Elimination runs on a dense
//! row-major work array but skips zero multipliers; the factors are then
//! stored compressed so the triangular solves only touch nonzeros.

/// Pivots below this magnitude mark the basis as singular.
const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug)]
pub(crate) struct Singular {
    /// Basis position whose column had no acceptable pivot.
    pub position: usize,
    /// Rows that were not yet pivoted when elimination stopped.
    pub free_rows: Vec<usize>,
}

#[derive(Debug, Default)]
pub(crate) struct LuFactors {
    m: usize,
    /// Row and basis position pivoted at elimination step `k`.
    pivot_row: Vec<usize>,
    pivot_col: Vec<usize>,
    /// Multipliers of step `k`: `(original row, l)`.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Above-diagonal part of step `k`'s column of U: `(step j < k, u)`.
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    /// Dense elimination array, all zero between factorizations.
    work: Vec<f64>,
    /// Input columns back to back, column `k` at `col_spans[k]`.
    entries: Vec<(usize, f64)>,
    col_spans: Vec<(usize, usize)>,
    col_rows: Vec<Vec<usize>>,
}

impl LuFactors {
    /// Factorizes the `m × m` matrix whose column `k` is given by
    /// `column(k)` as sparse `(row, value)` pairs.
    pub fn factorize<F>(&mut self, m: usize, mut column: F) -> Result<(), Singular>
    where
        F: FnMut(usize, &mut Vec<(usize, f64)>),
    {
        self.m = m;
        // Work array is row-major over elimination steps: entry (i, k) holds
        // row i of the column eliminated at step k.
        self.entries.clear();
        self.col_spans.clear();
        for k in 0..m {
            let from = self.entries.len();
            column(k, &mut self.entries);
            self.col_spans.push((from, self.entries.len()));
        }
        let spans = &self.col_spans;
        self.pivot_col.clear();
        self.pivot_col.extend(0..m);
        self.pivot_col.sort_by_key(|&k| (spans[k].1 - spans[k].0, k));
        if self.work.len() != m * m {
            self.work.clear();
            self.work.resize(m * m, 0.0);
        }
        for (step, &k) in self.pivot_col.iter().enumerate() {
            let (a, b) = spans[k];
            for &(i, v) in &self.entries[a..b] {
                self.work[i * m + step] += v;
            }
        }

        self.pivot_row.clear();
        self.u_diag.clear();
        self.l_cols.iter_mut().chain(self.u_cols.iter_mut()).for_each(Vec::clear);
        self.col_rows.iter_mut().for_each(Vec::clear);
        self.l_cols.resize_with(m, Vec::new);
        self.u_cols.resize_with(m, Vec::new);
        // Rows that may hold a nonzero in each step's column; fill-in is
        // appended, so every nonzero is listed (zeros may be too).
        self.col_rows.resize_with(m, Vec::new);
        let mut pivoted = vec![false; m];
        // Nonzeros of each row in the not yet eliminated columns.
        let mut row_nnz = vec![0usize; m];
        for (step, &k) in self.pivot_col.iter().enumerate() {
            let (a, b) = spans[k];
            for &(i, _) in &self.entries[a..b] {
                row_nnz[i] += 1;
                self.col_rows[step].push(i);
            }
        }
        let mut prow: Vec<(usize, f64)> = Vec::new();
        for k in 0..m {
            let w = &mut self.work;
            let candidates = std::mem::take(&mut self.col_rows[k]);
            let mut best = 0.0f64;
            for &i in &candidates {
                if !pivoted[i] {
                    best = best.max(w[i * m + k].abs());
                }
            }
            if best <= SINGULAR_TOL {
                w.iter_mut().for_each(|v| *v = 0.0);
                return Err(Singular {
                    position: self.pivot_col[k],
                    free_rows: (0..m).filter(|&i| !pivoted[i]).collect(),
                });
            }
            // Partial pivoting; among (near-)maximal entries the sparsest row
            // wins, which keeps fill-in low for 0/±1 bases. Ties on both go
            // to the lowest row.
            let mut p = usize::MAX;
            for &i in &candidates {
                let v = w[i * m + k].abs();
                if !pivoted[i]
                    && v >= best * (1.0 - 1e-12)
                    && (p == usize::MAX || (row_nnz[i], i) < (row_nnz[p], p))
                {
                    p = i;
                }
            }
            let piv = w[p * m + k];
            pivoted[p] = true;
            prow.clear();
            for j in k + 1..m {
                let u = w[p * m + j];
                if u != 0.0 {
                    prow.push((j, u));
                    self.u_cols[j].push((k, u));
                }
            }
            let l_col = &mut self.l_cols[k];
            for &i in &candidates {
                let v = w[i * m + k];
                if pivoted[i] || v == 0.0 {
                    continue;
                }
                row_nnz[i] -= 1;
                let l = v / piv;
                w[i * m + k] = 0.0;
                let row = &mut w[i * m..(i + 1) * m];
                for &(j, u) in &prow {
                    let before = row[j] != 0.0;
                    row[j] -= l * u;
                    let after = row[j] != 0.0;
                    if before != after {
                        if after {
                            row_nnz[i] += 1;
                            self.col_rows[j].push(i);
                        } else {
                            row_nnz[i] -= 1;
                        }
                    }
                }
                l_col.push((i, l));
            }
            // Hand the buffer back so its capacity is reused.
            self.col_rows[k] = candidates;
            self.pivot_row.push(p);
            self.u_diag.push(piv);
        }
        // Only the pivot rows still hold anything: their diagonal and U
        // entries.
        for k in 0..m {
            self.work[self.pivot_row[k] * m + k] = 0.0;
            for &(step, _) in &self.u_cols[k] {
                self.work[self.pivot_row[step] * m + k] = 0.0;
            }
        }
        log::trace!(
            "factorized {m}×{m}: {} L and {} U nonzeros",
            self.l_cols.iter().map(Vec::len).sum::<usize>(),
            self.u_cols.iter().map(Vec::len).sum::<usize>()
        );
        Ok(())
    }

    /// Solves `B x = a` in place; on entry `v` is `a` indexed by row, on exit
    /// it holds `x` indexed by basis position.
    pub fn ftran(&self, v: &mut [f64], scratch: &mut Vec<f64>) {
        let m = self.m;
        for k in 0..m {
            let vp = v[self.pivot_row[k]];
            if vp != 0.0 {
                for &(i, l) in &self.l_cols[k] {
                    v[i] -= l * vp;
                }
            }
        }
        scratch.clear();
        scratch.extend(self.pivot_row.iter().map(|&p| v[p]));
        for k in (0..m).rev() {
            let xk = scratch[k] / self.u_diag[k];
            scratch[k] = xk;
            if xk != 0.0 {
                for &(j, u) in &self.u_cols[k] {
                    scratch[j] -= u * xk;
                }
            }
        }
        for k in 0..m {
            v[self.pivot_col[k]] = scratch[k];
        }
    }

    /// Solves `Bᵀ w = c` in place; `v` enters indexed by basis position and
    /// leaves indexed by row.
    pub fn btran(&self, v: &mut [f64], scratch: &mut Vec<f64>) {
        let m = self.m;
        scratch.clear();
        scratch.resize(m, 0.0);
        for k in 0..m {
            let mut s = v[self.pivot_col[k]];
            for &(j, u) in &self.u_cols[k] {
                s -= u * scratch[j];
            }
            scratch[k] = s / self.u_diag[k];
        }
        for k in 0..m {
            v[self.pivot_row[k]] = scratch[k];
        }
        for k in (0..m).rev() {
            let mut s = 0.0;
            for &(i, l) in &self.l_cols[k] {
                s += l * v[i];
            }
            if s != 0.0 {
                v[self.pivot_row[k]] -= s;
            }
        }
    }
}

/// Picks one pivot row per column by partial-pivoting elimination of the
/// `m × columns.len()` matrix, using only rows marked `eligible`. Returns
/// `None` when the columns are dependent on those rows.
pub(crate) fn independent_rows(m: usize, columns: &[Vec<(usize, f64)>], eligible: &[bool]) -> Option<Vec<usize>> {
    let k = columns.len();
    let mut work = vec![0.0; m * k];
    for (c, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            work[i * k + c] += v;
        }
    }
    let mut active: Vec<usize> = (0..m).filter(|&i| eligible[i]).collect();
    let mut rows = Vec::with_capacity(k);
    let mut prow: Vec<(usize, f64)> = Vec::new();
    for c in 0..k {
        let mut p = usize::MAX;
        let mut best = SINGULAR_TOL;
        for &i in &active {
            let v = work[i * k + c].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if p == usize::MAX {
            return None;
        }
        let piv = work[p * k + c];
        prow.clear();
        prow.extend((c + 1..k).map(|j| (j, work[p * k + j])).filter(|&(_, u)| u != 0.0));
        for &i in &active {
            let v = work[i * k + c];
            if i == p || v == 0.0 {
                continue;
            }
            let l = v / piv;
            for &(j, u) in &prow {
                work[i * k + j] -= l * u;
            }
        }
        active.retain(|&i| i != p);
        rows.push(p);
    }
    Some(rows)
}

/// One basis change: position `r` replaced, `alpha` the entering column in
/// the old basis' coordinates, stored densely with `alpha[r]` zeroed. The
/// entering columns of these bases are mostly nonzero, so dense storage is
/// both smaller and faster than index lists.
#[derive(Debug)]
struct Eta {
    r: usize,
    pivot: f64,
    alpha: Vec<f64>,
}

/// LU factors of the last refactorized basis followed by an eta file.
#[derive(Debug, Default)]
pub(crate) struct BasisFactor {
    lu: LuFactors,
    etas: Vec<Eta>,
    /// Buffers of dropped etas, reused by later updates.
    spare: Vec<Vec<f64>>,
    scratch: Vec<f64>,
}

impl BasisFactor {
    pub fn refactor<F>(&mut self, m: usize, column: F) -> Result<(), Singular>
    where
        F: FnMut(usize, &mut Vec<(usize, f64)>),
    {
        self.spare.extend(self.etas.drain(..).map(|e| e.alpha));
        self.lu.factorize(m, column)
    }

    pub fn updates(&self) -> usize {
        self.etas.len()
    }

    pub fn ftran(&mut self, v: &mut [f64]) {
        self.lu.ftran(v, &mut self.scratch);
        for eta in &self.etas {
            let xr = v[eta.r] / eta.pivot;
            if xr != 0.0 {
                for (vi, a) in v.iter_mut().zip(&eta.alpha) {
                    *vi -= a * xr;
                }
            }
            v[eta.r] = xr;
        }
    }

    pub fn btran(&mut self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let s = v[eta.r] - dot(&eta.alpha, v);
            v[eta.r] = s / eta.pivot;
        }
        self.lu.btran(v, &mut self.scratch);
    }

    /// Records the replacement of basis position `r` by a column whose
    /// FTRAN image is `alpha`.
    pub fn push_update(&mut self, r: usize, alpha: &[f64]) {
        let mut stored = self.spare.pop().unwrap_or_default();
        stored.clear();
        stored.extend_from_slice(alpha);
        stored[r] = 0.0;
        self.etas.push(Eta {
            r,
            pivot: alpha[r],
            alpha: stored,
        });
    }
}

/// Dot product with four running sums.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for t in 0..4 {
            acc[t] += x[t] * y[t];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
