//! Phase-one simplex for `A x = b, x ≥ 0` on a dense tableau with Bland's
//! rule. On infeasibility the final tableau yields a Farkas vector `y` with
//! `yᵀA ≤ 0` and `yᵀb > 0`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOne {
    /// Optimal phase-one objective (sum of artificials) at or below `tol`.
    Feasible { x: Vec<f64>, objective: f64 },
    /// Objective stayed above `tol`; `y` is the dual of the final basis.
    Infeasible { y: Vec<f64>, objective: f64 },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry holds minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        self.rows[row].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                r.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, pv)| *v -= f * pv);
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            self.cost
                .iter_mut()
                .zip(&pivot_row)
                .for_each(|(v, pv)| *v -= f * pv);
        }
        self.basis[row] = col;
    }

    /// Bland: lowest-index improving column, then lowest-index basic
    /// variable among minimum-ratio rows.
    fn choose(&self) -> Option<(usize, Option<usize>)> {
        let rhs = self.rhs();
        let col = (0..rhs).find(|&j| self.cost[j] < -PIVOT_EPS)?;
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if r[col] <= PIVOT_EPS {
                continue;
            }
            let ratio = r[rhs] / r[col];
            best = match best {
                None => Some((i, ratio)),
                Some((b, br)) => {
                    if ratio < br - PIVOT_EPS
                        || (ratio <= br + PIVOT_EPS && self.basis[i] < self.basis[b])
                    {
                        Some((i, ratio))
                    } else {
                        Some((b, br))
                    }
                }
            };
        }
        Some((col, best.map(|(i, _)| i)))
    }
}

/// Minimizes the sum of artificial variables for `A x = b, x ≥ 0`.
pub fn phase_one(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<PhaseOne> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::InvalidParameter("row count mismatch".into()));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("ragged constraint matrix".into()));
    }
    let width = n + m + 1;
    let mut signs = vec![1.0; m];
    let mut rows = Vec::with_capacity(m);
    for (i, (ar, &bi)) in a.iter().zip(b).enumerate() {
        let s = if bi < 0.0 { -1.0 } else { 1.0 };
        signs[i] = s;
        let mut row = vec![0.0; width];
        row[..n].iter_mut().zip(ar).for_each(|(v, x)| *v = s * x);
        row[n + i] = 1.0;
        row[width - 1] = s * bi;
        rows.push(row);
    }
    let mut cost = vec![0.0; width];
    cost[n..n + m].fill(1.0);
    for r in &rows {
        cost.iter_mut().zip(r).for_each(|(c, v)| *c -= v);
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
    };

    let mut pivots = 0;
    while let Some((col, row)) = t.choose() {
        // The objective is bounded below by zero, so a ratio row always exists.
        let row = row.ok_or_else(|| Error::Numerical("unbounded phase-one column".into()))?;
        t.pivot(row, col);
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Numerical("simplex pivot limit reached".into()));
        }
    }

    let rhs = t.rhs();
    let objective = -t.cost[rhs];
    if objective <= tol {
        let mut x = vec![0.0; n];
        for (i, &j) in t.basis.iter().enumerate() {
            if j < n {
                x[j] = t.rows[i][rhs].max(0.0);
            }
        }
        Ok(PhaseOne::Feasible { x, objective })
    } else {
        let y = (0..m).map(|i| signs[i] * (1.0 - t.cost[n + i])).collect();
        Ok(PhaseOne::Infeasible { y, objective })
    }
}
