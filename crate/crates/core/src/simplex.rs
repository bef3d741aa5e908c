//! Dense two-phase simplex with Bland's rule.
//!
//! Small and exact enough for the desk-scale programs built in [`crate::kt`];
//! the pivoting rule is deterministic and cannot cycle.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `minimize cost . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub(crate) struct LinearProgram {
    pub num_vars: usize,
    pub cost: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    /// Constraint rows, each `width + 1` long with the right-hand side last.
    rows: Vec<Vec<f64>>,
    /// Reduced costs, with minus the current objective last.
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over the columns `allowed` until optimal.
    fn optimize(&mut self, allowed: usize, max_iter: usize) -> Result<()> {
        let w = self.width;
        for _ in 0..max_iter {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] < -EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[enter] > EPS {
                    let ratio = row[w] / row[enter];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Lp("objective is unbounded below".into()));
            };
            self.pivot(r, enter);
        }
        Err(Error::Lp(format!("no optimum after {max_iter} pivots")))
    }
}

type Row = (Vec<(usize, f64)>, Sense, f64);

pub(crate) fn solve(lp: &LinearProgram) -> Result<Solution> {
    let n = lp.num_vars;
    let m = lp.constraints.len();
    // normalize to nonnegative right-hand sides
    let normalized: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                (c.coeffs.iter().map(|&(j, v)| (j, -v)).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.sense, c.rhs)
            }
        })
        .collect();

    let n_slack = normalized.iter().filter(|c| c.1 != Sense::Eq).count();
    let n_art = normalized.iter().filter(|c| c.1 != Sense::Le).count();
    let width = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, art_start);
    for (coeffs, sense, rhs) in &normalized {
        let mut row = vec![0.0; width + 1];
        for &(j, v) in coeffs {
            row[j] += v;
        }
        row[width] = *rhs;
        match sense {
            Sense::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Sense::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Sense::Eq => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        obj: vec![0.0; width + 1],
        basis,
        width,
    };
    let max_iter = 50 * (m + width) + 1000;

    if n_art > 0 {
        for j in art_start..width {
            t.obj[j] = 1.0;
        }
        for r in 0..m {
            if t.basis[r] >= art_start {
                for j in 0..=width {
                    t.obj[j] -= t.rows[r][j];
                }
            }
        }
        t.optimize(width, max_iter)?;
        if -t.obj[width] > 1e-9 {
            return Err(Error::Lp("infeasible".into()));
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| t.rows[r][j].abs() > EPS) {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    t.obj = vec![0.0; width + 1];
    t.obj[..n].copy_from_slice(&lp.cost);
    for r in 0..t.rows.len() {
        let cb = if t.basis[r] < n { lp.cost[t.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..=width {
                t.obj[j] -= cb * t.rows[r][j];
            }
        }
    }
    t.optimize(art_start, max_iter)?;

    let mut x = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[r][width];
        }
    }
    let objective = x.iter().zip(&lp.cost).map(|(v, c)| v * c).sum();
    Ok(Solution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(coeffs: &[(usize, f64)], sense: Sense, rhs: f64) -> Constraint {
        Constraint {
            coeffs: coeffs.to_vec(),
            sense,
            rhs,
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let lp = LinearProgram {
            num_vars: 2,
            cost: vec![-3.0, -5.0],
            constraints: vec![
                c(&[(0, 1.0)], Sense::Le, 4.0),
                c(&[(1, 2.0)], Sense::Le, 12.0),
                c(&[(0, 3.0), (1, 2.0)], Sense::Le, 18.0),
            ],
        };
        let s = solve(&lp).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn needs_phase_one() {
        // min x + y s.t. x + y >= 2, x - y = 0
        let lp = LinearProgram {
            num_vars: 2,
            cost: vec![1.0, 1.0],
            constraints: vec![
                c(&[(0, 1.0), (1, 1.0)], Sense::Ge, 2.0),
                c(&[(0, 1.0), (1, -1.0)], Sense::Eq, 0.0),
            ],
        };
        let s = solve(&lp).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_is_flipped() {
        // min y s.t. -y <= -3
        let lp = LinearProgram {
            num_vars: 1,
            cost: vec![1.0],
            constraints: vec![c(&[(0, -1.0)], Sense::Le, -3.0)],
        };
        assert!((solve(&lp).unwrap().objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = LinearProgram {
            num_vars: 1,
            cost: vec![1.0],
            constraints: vec![c(&[(0, 1.0)], Sense::Le, 1.0), c(&[(0, 1.0)], Sense::Ge, 2.0)],
        };
        assert!(solve(&infeasible).is_err());
        let unbounded = LinearProgram {
            num_vars: 1,
            cost: vec![-1.0],
            constraints: vec![c(&[(0, 1.0)], Sense::Ge, 0.0)],
        };
        assert!(solve(&unbounded).is_err());
    }
}
