//! Dense revised simplex for equality-form LPs with very few rows.
//!
//! `minimize c'x  s.t.  A x = b, x >= 0`. The basis inverse is kept
//! explicitly (at most a handful of rows), columns are priced with
//! Dantzig's rule and the solver falls back to Bland's rule after a run of
//! degenerate pivots so it cannot cycle.
//!
//! The constraint matrix is fixed while objectives may change: a
//! [`WarmSimplex`] keeps the last optimal basis, which stays primal feasible
//! for any new objective, so consecutive solves skip phase one.

use crate::error::{Error, Result};

const FEASIBILITY_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-10;
const DEGENERATE_RUN: usize = 25;

/// Constraint system `A x = b` stored column-major.
#[derive(Debug, Clone)]
pub struct LpProblem {
    rows: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LpProblem {
    pub fn new(b: Vec<f64>) -> Self {
        Self {
            rows: b.len(),
            a: Vec::new(),
            b,
        }
    }

    pub fn push_column(&mut self, column: &[f64]) {
        assert_eq!(column.len(), self.rows, "column length must match row count");
        self.a.extend_from_slice(column);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        if self.rows == 0 {
            0
        } else {
            self.a.len() / self.rows
        }
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.a[j * self.rows..(j + 1) * self.rows]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// `c'x` at the final basis.
    pub objective: f64,
    /// `b'y` for the final simplex multipliers.
    pub dual_objective: f64,
    /// Positive basic variables as `(column, value)`, sorted by column.
    pub x: Vec<(usize, f64)>,
    pub duals: Vec<f64>,
    /// Largest violation of `c_j - y'A_j >= 0` over all columns.
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

/// Solves a single LP from scratch.
pub fn minimize(lp: &LpProblem, cost: &[f64]) -> Result<LpSolution> {
    WarmSimplex::new(lp)?.minimize(cost)
}

/// Simplex state that survives across objectives on the same constraints.
#[derive(Debug, Clone)]
pub struct WarmSimplex<'a> {
    lp: &'a LpProblem,
    /// Rows with negative right-hand side are negated internally.
    sign: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
}

enum Phase<'c> {
    One,
    Two(&'c [f64]),
}

impl<'a> WarmSimplex<'a> {
    /// Runs phase one; fails with [`Error::Infeasible`] when no feasible
    /// point exists.
    pub fn new(lp: &'a LpProblem) -> Result<Self> {
        let m = lp.rows();
        let n = lp.cols();
        let sign: Vec<f64> = lp
            .rhs()
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let b: Vec<f64> = lp.rhs().iter().zip(&sign).map(|(v, s)| v * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut solver = Self {
            lp,
            sign,
            xb: b.clone(),
            b,
            basis: (n..n + m).collect(),
            binv,
        };
        solver.iterate(Phase::One)?;
        let infeasibility: f64 = solver
            .basis
            .iter()
            .zip(&solver.xb)
            .filter(|(&j, _)| j >= n)
            .map(|(_, &v)| v)
            .sum();
        if infeasibility > FEASIBILITY_TOL {
            return Err(Error::Infeasible);
        }
        solver.drive_out_artificials();
        Ok(solver)
    }

    fn n(&self) -> usize {
        self.lp.cols()
    }

    fn m(&self) -> usize {
        self.lp.rows()
    }

    /// Column `j` with row signs applied; indices past `n` are artificials.
    fn column_into(&self, j: usize, out: &mut [f64]) {
        let n = self.n();
        if j >= n {
            out.fill(0.0);
            out[j - n] = 1.0;
        } else {
            for ((o, a), s) in out.iter_mut().zip(self.lp.column(j)).zip(&self.sign) {
                *o = a * s;
            }
        }
    }

    fn ftran(&self, column: &[f64], out: &mut [f64]) {
        let m = self.m();
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..m).map(|k| self.binv[i * m + k] * column[k]).sum();
        }
    }

    fn multipliers(&self, cost_of: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let m = self.m();
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost_of(j)).collect();
        (0..m)
            .map(|k| (0..m).map(|i| cb[i] * self.binv[i * m + k]).sum())
            .collect()
    }

    fn reduced_cost(&self, j: usize, cost: f64, y: &[f64]) -> f64 {
        let col = self.lp.column(j);
        let dot: f64 = y
            .iter()
            .zip(col)
            .zip(&self.sign)
            .map(|((yi, a), s)| yi * a * s)
            .sum();
        cost - dot
    }

    fn pivot(&mut self, row: usize, alpha: &[f64], entering: usize) {
        let m = self.m();
        let pivot = alpha[row];
        for k in 0..m {
            self.binv[row * m + k] /= pivot;
        }
        self.xb[row] /= pivot;
        for i in 0..m {
            if i == row || alpha[i] == 0.0 {
                continue;
            }
            let factor = alpha[i];
            for k in 0..m {
                self.binv[i * m + k] -= factor * self.binv[row * m + k];
            }
            self.xb[i] -= factor * self.xb[row];
        }
        self.basis[row] = entering;
    }

    fn iterate(&mut self, phase: Phase<'_>) -> Result<usize> {
        let n = self.n();
        let m = self.m();
        let cost_of = |j: usize| -> f64 {
            match phase {
                Phase::One => {
                    if j >= n {
                        1.0
                    } else {
                        0.0
                    }
                }
                Phase::Two(c) => {
                    if j >= n {
                        0.0
                    } else {
                        c[j]
                    }
                }
            }
        };
        let max_iterations = 50 * (n + m) + 1000;
        let mut in_basis = vec![false; n];
        for &j in &self.basis {
            if j < n {
                in_basis[j] = true;
            }
        }
        let mut column = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        let mut degenerate_run = 0usize;
        for iteration in 0..max_iterations {
            let y = self.multipliers(&cost_of);
            let bland = degenerate_run >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -OPTIMALITY_TOL;
            for j in (0..n).filter(|&j| !in_basis[j]) {
                let d = self.reduced_cost(j, cost_of(j), &y);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(entering) = entering else {
                return Ok(iteration);
            };
            self.column_into(entering, &mut column);
            self.ftran(&column, &mut alpha);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if alpha[i] > PIVOT_TOL {
                    let ratio = self.xb[i].max(0.0) / alpha[i];
                    let better = match leave {
                        None => true,
                        Some((r, best_ratio)) => {
                            if ratio < best_ratio - 1e-14 {
                                true
                            } else if ratio <= best_ratio + 1e-14 {
                                if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    alpha[i] > alpha[r]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, step)) = leave else {
                return Err(Error::Unbounded);
            };
            if step <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let leaving = self.basis[row];
            if leaving < n {
                in_basis[leaving] = false;
            }
            in_basis[entering] = true;
            self.pivot(row, &alpha, entering);
            for v in self.xb.iter_mut() {
                if *v < 0.0 && *v > -FEASIBILITY_TOL {
                    *v = 0.0;
                }
            }
        }
        Err(Error::IterationLimit)
    }

    /// Swaps zero-level artificials for structural columns where possible.
    /// Rows whose artificial cannot leave are linearly dependent.
    fn drive_out_artificials(&mut self) {
        let n = self.n();
        let m = self.m();
        let mut column = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        for row in 0..m {
            if self.basis[row] < n {
                continue;
            }
            let candidate = (0..n).filter(|j| !self.basis.contains(j)).find_map(|j| {
                self.column_into(j, &mut column);
                self.ftran(&column, &mut alpha);
                (alpha[row].abs() > 1e-9).then(|| (j, alpha.clone()))
            });
            if let Some((j, a)) = candidate {
                self.pivot(row, &a, j);
            }
        }
    }

    /// Rebuilds the basis inverse from the current basis columns.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m();
        let mut mat = vec![0.0; m * m];
        let mut column = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column_into(j, &mut column);
            for i in 0..m {
                mat[i * m + k] = column[i];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&a, &b| mat[a * m + col].abs().total_cmp(&mat[b * m + col].abs()))
                .unwrap_or(col);
            if mat[pivot_row * m + col].abs() < 1e-13 {
                return Err(Error::Infeasible);
            }
            for k in 0..m {
                mat.swap(col * m + k, pivot_row * m + k);
                inv.swap(col * m + k, pivot_row * m + k);
            }
            let p = mat[col * m + col];
            for k in 0..m {
                mat[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for i in 0..m {
                if i == col {
                    continue;
                }
                let factor = mat[i * m + col];
                if factor == 0.0 {
                    continue;
                }
                for k in 0..m {
                    mat[i * m + k] -= factor * mat[col * m + k];
                    inv[i * m + k] -= factor * inv[col * m + k];
                }
            }
        }
        self.binv = inv;
        let mut xb = vec![0.0; m];
        self.ftran(&self.b, &mut xb);
        for v in xb.iter_mut() {
            if *v < 0.0 {
                if *v < -FEASIBILITY_TOL {
                    return Err(Error::Infeasible);
                }
                *v = 0.0;
            }
        }
        self.xb = xb;
        Ok(())
    }

    /// Minimizes `cost` starting from the last basis.
    pub fn minimize(&mut self, cost: &[f64]) -> Result<LpSolution> {
        let n = self.n();
        assert_eq!(cost.len(), n, "cost length must match column count");
        let scale = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let scaled: Vec<f64> = cost.iter().map(|c| c / scale).collect();
        if self.refactor().is_err() {
            *self = WarmSimplex::new(self.lp)?;
        }
        let iterations = self.iterate(Phase::Two(&scaled))?;

        let cost_of = |j: usize| if j >= n { 0.0 } else { scaled[j] };
        let y_scaled = self.multipliers(&cost_of);
        let dual_infeasibility = (0..n)
            .map(|j| -self.reduced_cost(j, scaled[j], &y_scaled))
            .fold(0.0f64, f64::max)
            * scale;
        // Undo the internal row signs so duals refer to the caller's rows.
        let duals: Vec<f64> = y_scaled
            .iter()
            .zip(&self.sign)
            .map(|(y, s)| y * s * scale)
            .collect();
        let dual_objective: f64 = duals.iter().zip(self.lp.rhs()).map(|(y, b)| y * b).sum();
        let mut x: Vec<(usize, f64)> = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, &v)| j < n && v > 0.0)
            .map(|(&j, &v)| (j, v))
            .collect();
        x.sort_by_key(|&(j, _)| j);
        let objective = x.iter().map(|&(j, v)| cost[j] * v).sum();
        Ok(LpSolution {
            objective,
            dual_objective,
            x,
            duals,
            dual_infeasibility,
            iterations,
        })
    }
}
