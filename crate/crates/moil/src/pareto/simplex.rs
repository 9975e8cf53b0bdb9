//! Dense two-phase simplex for the small equality-form programs used by the
//! front metric and supporting-weight search.
//!
//! Solves `maximize c.x subject to A x = b, x >= 0`. Instances here have at
//! most a few dozen variables, so a dense tableau with Bland's pivoting rule
//! (which cannot cycle) is both simple and exact to machine precision.

use std::fmt;

const PIVOT_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-8;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    Stalled,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "infeasible"),
            LpError::Unbounded => write!(f, "unbounded"),
            LpError::Stalled => write!(f, "pivot limit exceeded"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    /// `m` constraint rows, each `cols + 1` wide (rhs last).
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row `z_j - c_j`, rhs cell holds the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= piv;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f != 0.0 {
                for j in 0..=self.cols {
                    let delta = f * self.rows[row][j];
                    self.rows[i][j] -= delta;
                }
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for j in 0..=self.cols {
                self.cost[j] -= f * self.rows[row][j];
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: enter the lowest-index improving column, leave at the
    /// lowest-index basic variable among minimum-ratio rows.
    fn optimize(&mut self, allowed_cols: usize) -> Result<(), LpError> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed_cols).find(|&j| self.cost[j] < -PIVOT_EPS);
            let Some(e) = entering else { return Ok(()) };

            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][e];
                if a > PIVOT_EPS {
                    let ratio = self.rows[i][self.cols] / a;
                    // The ratio comparison must be exact: leaving on a row
                    // whose ratio is even slightly above the minimum sends
                    // another basic variable negative, and over a long
                    // degenerate pivot chain those slips compound into a
                    // phantom phase-1 infeasibility.
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio
                                || (ratio == best_ratio && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(l, e);
        }
        Err(LpError::Stalled)
    }
}

/// Maximize `c.x` subject to `a x = b`, `x >= 0`, with `a` given row-major
/// (`m` rows of length `n`).
pub fn maximize(c: &[f64], a: &[f64], b: &[f64], m: usize, n: usize) -> Result<LpSolution, LpError> {
    assert_eq!(c.len(), n, "objective length");
    assert_eq!(a.len(), m * n, "constraint matrix size");
    assert_eq!(b.len(), m, "rhs length");

    // Phase 1 tableau: structural columns, one artificial per row, rhs >= 0.
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; cols + 1];
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * a[i * n + j];
        }
        row[n + i] = 1.0;
        row[cols] = sign * b[i];
        rows.push(row);
    }
    // Phase 1 maximizes minus the artificial sum; with the identity basis the
    // reduced cost of structural column j is minus its column sum.
    let mut cost = vec![0.0; cols + 1];
    for j in 0..=cols {
        let mut s = 0.0;
        for row in &rows {
            s += row[j];
        }
        if j < n || j == cols {
            cost[j] = -s;
        }
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        cols,
    };
    t.optimize(cols)?;
    // The cost rhs cell drifts by accumulated pivot roundoff, so judge
    // feasibility by the artificial variables still in the basis; nonbasic
    // ones are exactly zero.
    let infeasibility: f64 = t
        .basis
        .iter()
        .enumerate()
        .filter(|&(_, &bv)| bv >= n)
        .map(|(i, _)| t.rows[i][cols].max(0.0))
        .sum();
    if infeasibility > FEAS_EPS {
        return Err(LpError::Infeasible);
    }

    // Drive artificials out of the basis; rows where no structural pivot
    // exists are redundant and dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t.rows[i][j].abs() > PIVOT_EPS) {
                t.pivot(i, j);
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    // Phase 2: rebuild the reduced-cost row for the real objective and
    // restrict pivoting to structural columns.
    for j in 0..=cols {
        let mut z = 0.0;
        for (i, row) in t.rows.iter().enumerate() {
            let cb = if t.basis[i] < n { c[t.basis[i]] } else { 0.0 };
            z += cb * row[j];
        }
        t.cost[j] = z - if j < n { c[j] } else { 0.0 };
    }
    t.cost[cols] = {
        let mut z = 0.0;
        for (i, row) in t.rows.iter().enumerate() {
            if t.basis[i] < n {
                z += c[t.basis[i]] * row[cols];
            }
        }
        z
    };
    t.optimize(n)?;

    let mut x = vec![0.0; n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][cols].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}
