//! Dense primal simplex with bounded variables.
//!
//! Every row `a_i . x (<=|=) rhs_i` gets a slack `s_i` with bounds `[0, inf)`
//! or `[0, 0]`, so the working system is `A x + s = rhs` with all columns
//! bounded on at least one side. Rows whose initial residual falls outside
//! the slack bounds receive an artificial column; phase one drives those to
//! zero, phase two minimizes the real cost with the artificials fixed.
//!
//! Pricing is Dantzig (largest reduced cost) until more than `2n` degenerate
//! pivots have been taken, after which the solver switches to Bland's rule
//! for the rest of the solve. The final basic solution is recomputed from the
//! original rows by Gaussian elimination to remove accumulated drift.

use super::{LinearRow, Region, RowSense};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    /// Numerical breakdown, with a short diagnostic.
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn infeasible(n: usize) -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; n],
            value: f64::INFINITY,
            iterations: 0,
        }
    }

    fn error(n: usize, msg: String, iterations: usize) -> Self {
        LpSolution {
            status: LpStatus::Error(msg),
            x: vec![0.0; n],
            value: f64::NAN,
            iterations,
        }
    }
}

/// `min direction . x` over the region's rows and bounds with the given
/// variables fixed.
pub fn solve_lp(direction: &[f64], region: &Region, fixings: &[(usize, f64)]) -> LpSolution {
    let mut lb = region.lb.clone();
    let mut ub = region.ub.clone();
    for &(k, v) in fixings {
        lb[k] = v;
        ub[k] = v;
    }
    solve_bounded(direction, &region.rows, &lb, &ub)
}

pub(crate) fn solve_bounded(cost: &[f64], rows: &[LinearRow], lb: &[f64], ub: &[f64]) -> LpSolution {
    let n = lb.len();
    if lb.iter().zip(ub).any(|(l, u)| *l > *u + 1e-9) {
        return LpSolution::infeasible(n);
    }
    if rows.is_empty() {
        let x: Vec<f64> = (0..n)
            .map(|k| if cost[k] < 0.0 { ub[k] } else { lb[k] })
            .collect();
        let value = x.iter().zip(cost).map(|(a, b)| a * b).sum();
        return LpSolution {
            status: LpStatus::Optimal,
            x,
            value,
            iterations: 0,
        };
    }
    let mut s = Simplex::new(cost, rows, lb, ub);
    s.solve(cost, rows)
}

struct Simplex {
    n: usize,
    m: usize,
    ncols: usize,
    /// Original dense rows, `m x n`, for the final recomputation.
    a: Vec<f64>,
    rhs: Vec<f64>,
    /// Sign of the artificial column of each row, if it has one.
    art_sign: Vec<Option<f64>>,
    art_col: Vec<Option<usize>>,
    /// Tableau `B^-1 [A I Art]`, `m x ncols`.
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    at_upper: Vec<bool>,
    d: Vec<f64>,
    degenerate: usize,
    bland: bool,
    iterations: usize,
}

impl Simplex {
    fn new(cost: &[f64], rows: &[LinearRow], lb: &[f64], ub: &[f64]) -> Self {
        let n = lb.len();
        let m = rows.len();
        let mut a = vec![0.0; m * n];
        let mut rhs = vec![0.0; m];
        for (i, row) in rows.iter().enumerate() {
            for &(k, v) in &row.coefs {
                a[i * n + k] += v;
            }
            rhs[i] = row.rhs;
        }

        let mut lo = Vec::with_capacity(n + 2 * m);
        let mut hi = Vec::with_capacity(n + 2 * m);
        let mut at_upper = Vec::with_capacity(n + 2 * m);
        for k in 0..n {
            lo.push(lb[k]);
            hi.push(ub[k]);
            at_upper.push(cost[k] < 0.0 && lb[k] < ub[k]);
        }
        for row in rows {
            lo.push(0.0);
            hi.push(match row.sense {
                RowSense::Le => f64::INFINITY,
                RowSense::Eq => 0.0,
            });
            at_upper.push(false);
        }

        let xval = |k: usize| if at_upper[k] { ub[k] } else { lb[k] };
        let residual: Vec<f64> = (0..m)
            .map(|i| rhs[i] - (0..n).map(|k| a[i * n + k] * xval(k)).sum::<f64>())
            .collect();

        let mut art_sign = vec![None; m];
        let mut art_col = vec![None; m];
        let mut ncols = n + m;
        for i in 0..m {
            let (slo, shi) = (lo[n + i], hi[n + i]);
            let r = residual[i];
            if r < slo || r > shi {
                let sb = r.clamp(slo, shi);
                art_sign[i] = Some(if r > sb { 1.0 } else { -1.0 });
                art_col[i] = Some(ncols);
                ncols += 1;
            }
        }
        for _ in n + m..ncols {
            lo.push(0.0);
            hi.push(f64::INFINITY);
            at_upper.push(false);
        }

        let mut t = vec![0.0; m * ncols];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut basic_row = vec![None; ncols];
        for i in 0..m {
            let sigma = art_sign[i].unwrap_or(1.0);
            let row = &mut t[i * ncols..(i + 1) * ncols];
            for k in 0..n {
                row[k] = a[i * n + k] / sigma;
            }
            row[n + i] = 1.0 / sigma;
            match art_col[i] {
                Some(c) => {
                    row[c] = 1.0;
                    let sb = residual[i].clamp(lo[n + i], hi[n + i]);
                    beta[i] = (residual[i] - sb) / sigma;
                    basis[i] = c;
                    basic_row[c] = Some(i);
                }
                None => {
                    beta[i] = residual[i];
                    basis[i] = n + i;
                    basic_row[n + i] = Some(i);
                }
            }
        }

        Simplex {
            n,
            m,
            ncols,
            a,
            rhs,
            art_sign,
            art_col,
            t,
            beta,
            basis,
            basic_row,
            lo,
            hi,
            at_upper,
            d: vec![0.0; ncols],
            degenerate: 0,
            bland: false,
            iterations: 0,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.hi[j]
        } else {
            self.lo[j]
        }
    }

    fn compute_reduced_costs(&mut self, cost: &[f64]) {
        for j in 0..self.ncols {
            self.d[j] = cost[j];
        }
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                for j in 0..self.ncols {
                    self.d[j] -= cb * row[j];
                }
            }
        }
        for i in 0..self.m {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn choose_entering(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols {
            if self.basic_row[j].is_some() || self.lo[j] >= self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let improving = if self.at_upper[j] { dj > COST_TOL } else { dj < -COST_TOL };
            if !improving {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            if best.map_or(true, |(_, b)| dj.abs() > b) {
                best = Some((j, dj.abs()));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Runs simplex iterations on the current reduced costs until optimal.
    fn iterate(&mut self) -> Result<(), String> {
        let max_iter = 200 * (self.m + self.ncols) + 1000;
        while let Some(q) = self.choose_entering() {
            self.iterations += 1;
            if self.iterations > max_iter {
                return Err(format!("iteration limit {max_iter} reached"));
            }
            let delta = if self.at_upper[q] { -1.0 } else { 1.0 };

            let mut theta = f64::INFINITY;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let alpha = self.t[i * self.ncols + q] * delta;
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL && self.lo[b].is_finite() {
                    ((self.beta[i] - self.lo[b]) / alpha).max(0.0)
                } else if alpha < -PIVOT_TOL && self.hi[b].is_finite() {
                    ((self.hi[b] - self.beta[i]) / -alpha).max(0.0)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((r, ar)) => {
                        if limit < theta - DEGENERATE_STEP {
                            true
                        } else if limit <= theta + DEGENERATE_STEP {
                            if self.bland {
                                b < self.basis[r]
                            } else {
                                alpha.abs() > ar.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = theta.min(limit);
                    leave = Some((i, alpha));
                }
            }

            let flip = self.hi[q] - self.lo[q];
            if flip.is_infinite() && leave.is_none() {
                return Err("unbounded direction".into());
            }
            if theta <= DEGENERATE_STEP {
                self.degenerate += 1;
                if self.degenerate > 2 * self.n {
                    self.bland = true;
                }
            }

            if flip <= theta {
                for i in 0..self.m {
                    let alpha = self.t[i * self.ncols + q] * delta;
                    self.beta[i] -= alpha * flip;
                }
                self.at_upper[q] = !self.at_upper[q];
                continue;
            }

            let (r, alpha_r) = leave.expect("bounded step has a leaving row");
            let entering_value = self.nonbasic_value(q) + delta * theta;
            for i in 0..self.m {
                let alpha = self.t[i * self.ncols + q] * delta;
                self.beta[i] -= alpha * theta;
            }
            let leaving = self.basis[r];
            self.at_upper[leaving] = alpha_r < 0.0;
            self.pivot(r, q);
            self.beta[r] = entering_value;
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + q];
        for j in 0..nc {
            self.t[r * nc + j] /= piv;
        }
        let pivot_row: Vec<f64> = self.t[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + q];
            if f != 0.0 {
                let row = &mut self.t[i * nc..(i + 1) * nc];
                for j in 0..nc {
                    row[j] -= f * pivot_row[j];
                }
                row[q] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for j in 0..nc {
                self.d[j] -= dq * pivot_row[j];
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.basic_row[leaving] = None;
        self.basis[r] = q;
        self.basic_row[q] = Some(r);
    }

    fn solve(&mut self, cost: &[f64], rows: &[LinearRow]) -> LpSolution {
        let n = self.n;
        let has_artificials = self.art_col.iter().any(Option::is_some);
        if has_artificials {
            let mut c1 = vec![0.0; self.ncols];
            for c in self.art_col.iter().flatten() {
                c1[*c] = 1.0;
            }
            self.compute_reduced_costs(&c1);
            if let Err(msg) = self.iterate() {
                return LpSolution::error(n, format!("phase one: {msg}"), self.iterations);
            }
            let infeasibility: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= n + self.m)
                .map(|i| self.beta[i])
                .sum();
            let scale = 1.0 + self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if infeasibility > 1e-8 * scale {
                let mut sol = LpSolution::infeasible(n);
                sol.iterations = self.iterations;
                return sol;
            }
            for c in self.art_col.iter().flatten() {
                self.hi[*c] = 0.0;
                self.at_upper[*c] = false;
            }
        }

        let mut c2 = vec![0.0; self.ncols];
        c2[..n].copy_from_slice(cost);
        self.compute_reduced_costs(&c2);
        if let Err(msg) = self.iterate() {
            return LpSolution::error(n, format!("phase two: {msg}"), self.iterations);
        }

        self.recompute_basic_values();
        let mut x = vec![0.0; n];
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = match self.basic_row[k] {
                Some(i) => self.beta[i].clamp(self.lo[k], self.hi[k]),
                None => self.nonbasic_value(k),
            };
        }
        let residual = rows.iter().fold(0.0f64, |m, r| m.max(r.violation(&x)));
        if residual > 1e-6 {
            return LpSolution::error(
                n,
                format!("row residual {residual:e} after {} iterations", self.iterations),
                self.iterations,
            );
        }
        let value = x.iter().zip(cost).map(|(a, b)| a * b).sum();
        LpSolution {
            status: LpStatus::Optimal,
            x,
            value,
            iterations: self.iterations,
        }
    }

    /// Solves `B x_B = rhs - N x_N` from the original rows. Keeps the
    /// tableau values if the basis matrix is numerically singular.
    fn recompute_basic_values(&mut self) {
        let (n, m) = (self.n, self.m);
        let column = |j: usize, i: usize| -> f64 {
            if j < n {
                self.a[i * n + j]
            } else if j < n + m {
                if j - n == i {
                    1.0
                } else {
                    0.0
                }
            } else {
                match self.art_col[i] {
                    Some(c) if c == j => self.art_sign[i].unwrap_or(1.0),
                    _ => 0.0,
                }
            }
        };
        let mut b = vec![0.0; m * m];
        let mut r = self.rhs.clone();
        for (col, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                b[i * m + col] = column(j, i);
            }
        }
        for j in 0..self.ncols {
            if self.basic_row[j].is_some() {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri -= column(j, i) * v;
                }
            }
        }
        if let Some(sol) = gaussian_solve(&mut b, &mut r, m) {
            self.beta = sol;
        }
    }
}

/// Solves the dense `m x m` system in place with partial pivoting.
fn gaussian_solve(a: &mut [f64], b: &mut [f64], m: usize) -> Option<Vec<f64>> {
    for col in 0..m {
        let (piv_row, piv_abs) = (col..m)
            .map(|i| (i, a[i * m + col].abs()))
            .fold((col, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs < 1e-12 {
            return None;
        }
        if piv_row != col {
            for j in 0..m {
                a.swap(col * m + j, piv_row * m + j);
            }
            b.swap(col, piv_row);
        }
        let p = a[col * m + col];
        for i in col + 1..m {
            let f = a[i * m + col] / p;
            if f != 0.0 {
                for j in col..m {
                    a[i * m + j] -= f * a[col * m + j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| a[i * m + j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i * m + i];
    }
    Some(x)
}
