//! Exact dictionary simplex for `max c·x  s.t.  A x ≤ b, x ≥ 0` with
//! `b ≥ 0`, so the all-slack basis is feasible and no phase one is needed.
//!
//! Entering and leaving variables follow Bland's rule (smallest index),
//! which rules out cycling under degeneracy and makes the optimal basis a
//! deterministic function of the input.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct StandardLp {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Optimal primal point.
    pub x: Vec<Rational>,
    /// Optimal multipliers of the `≤` rows (a solution of the dual
    /// `min b·y  s.t.  Aᵀy ≥ c, y ≥ 0`).
    pub y: Vec<Rational>,
    pub value: Rational,
    pub pivots: usize,
}

/// Variables `0..nvars` are structural, `nvars..nvars+nrows` are slacks.
struct Dictionary {
    /// `x_basic[r] = rhs[r] - Σ_c table[r][c] x_nonbasic[c]`
    table: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// `z = value + Σ_c cost[c] x_nonbasic[c]`
    cost: Vec<Rational>,
    value: Rational,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Dictionary {
    fn entering(&self) -> Option<usize> {
        self.cost
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .min_by_key(|(col, _)| self.nonbasic[*col])
            .map(|(col, _)| col)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in self.table.iter().enumerate() {
            let a = &row[col];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[r] / a;
            let better = match &best {
                None => true,
                Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basic[r] < self.basic[*br]),
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let a = self.table[row][col].clone();
        let inv = a.recip();
        for (c, v) in self.table[row].iter_mut().enumerate() {
            if c == col {
                *v = inv.clone();
            } else if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[row] *= &inv;

        let pivot_row = std::mem::take(&mut self.table[row]);
        let pivot_rhs = self.rhs[row].clone();
        for (r, tr) in self.table.iter_mut().enumerate() {
            if r == row || tr[col].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut tr[col], Rational::zero());
            for (c, pv) in pivot_row.iter().enumerate() {
                if pv.is_zero() {
                    continue;
                }
                if c == col {
                    tr[c] = -(&f * pv);
                } else {
                    tr[c] -= &f * pv;
                }
            }
            self.rhs[r] -= &f * &pivot_rhs;
        }
        let f = std::mem::replace(&mut self.cost[col], Rational::zero());
        for (c, pv) in pivot_row.iter().enumerate() {
            if pv.is_zero() {
                continue;
            }
            if c == col {
                self.cost[c] = -(&f * pv);
            } else {
                self.cost[c] -= &f * pv;
            }
        }
        self.value += &f * &pivot_rhs;
        self.table[row] = pivot_row;
        std::mem::swap(&mut self.basic[row], &mut self.nonbasic[col]);
    }
}

impl StandardLp {
    pub fn solve(&self) -> Result<LpSolution> {
        let nvars = self.objective.len();
        let nrows = self.rows.len();
        if self.rhs.len() != nrows || self.rows.iter().any(|r| r.len() != nvars) {
            return Err(Error::Inconsistent("LP dimensions do not match".into()));
        }
        if self.rhs.iter().any(|b| b.is_negative()) {
            return Err(Error::Domain("right-hand sides must be nonnegative".into()));
        }
        let mut dict = Dictionary {
            table: self.rows.clone(),
            rhs: self.rhs.clone(),
            cost: self.objective.clone(),
            value: Rational::zero(),
            basic: (nvars..nvars + nrows).collect(),
            nonbasic: (0..nvars).collect(),
        };
        let mut pivots = 0;
        while let Some(col) = dict.entering() {
            let row = dict
                .leaving(col)
                .ok_or_else(|| Error::Domain("LP is unbounded".into()))?;
            dict.pivot(row, col);
            pivots += 1;
        }
        let mut x = vec![Rational::zero(); nvars];
        for (r, &var) in dict.basic.iter().enumerate() {
            if var < nvars {
                x[var] = dict.rhs[r].clone();
            }
        }
        let mut y = vec![Rational::zero(); nrows];
        for (c, &var) in dict.nonbasic.iter().enumerate() {
            if var >= nvars {
                y[var - nvars] = -dict.cost[c].clone();
            }
        }
        Ok(LpSolution {
            x,
            y,
            value: dict.value,
            pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn lp(obj: &[i64], rows: &[&[i64]], rhs: &[i64]) -> StandardLp {
        StandardLp {
            objective: obj.iter().map(|&v| Rational::from_integer(v.into())).collect(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
            rhs: rhs.iter().map(|&v| Rational::from_integer(v.into())).collect(),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 5x + 4y + 3z ; 2x+3y+z ≤ 5, 4x+y+2z ≤ 11, 3x+4y+2z ≤ 8
        let sol = lp(&[5, 4, 3], &[&[2, 3, 1], &[4, 1, 2], &[3, 4, 2]], &[5, 11, 8])
            .solve()
            .unwrap();
        assert_eq!(sol.value, int(13));
        assert_eq!(sol.x, vec![int(2), int(0), int(1)]);
        let dual: Rational = sol.y.iter().zip([5, 11, 8]).map(|(y, b)| y * int(b)).sum();
        assert_eq!(dual, int(13));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y ; x + 2y ≤ 1, 2x + y ≤ 1
        let sol = lp(&[1, 1], &[&[1, 2], &[2, 1]], &[1, 1]).solve().unwrap();
        assert_eq!(sol.value, ratio(2, 3));
        assert_eq!(sol.y, vec![ratio(1, 3), ratio(1, 3)]);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example for the largest-coefficient rule
        let sol = StandardLp {
            objective: vec![ratio(3, 4), int(0) - int(150), ratio(1, 50), int(0) - int(6)],
            rows: vec![
                vec![ratio(1, 4), int(0) - int(60), ratio(-1, 25), int(9)],
                vec![ratio(1, 2), int(0) - int(90), ratio(-1, 50), int(3)],
                vec![int(0), int(0), int(1), int(0)],
            ],
            rhs: vec![int(0), int(0), int(1)],
        }
        .solve()
        .unwrap();
        assert_eq!(sol.value, ratio(1, 20));
    }

    #[test]
    fn unbounded_is_reported() {
        let err = lp(&[1, 1], &[&[1, -1]], &[1]).solve().unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
