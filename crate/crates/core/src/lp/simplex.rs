//! Dense primal simplex for `max c·x, A x <= b, x >= 0` with `b >= 0`.
//!
//! The origin is always feasible, so no phase one is needed. Columns can be
//! added after a solve and the next solve warm-starts from the current basis.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub trait LpScalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Strictly positive beyond rounding noise.
    fn is_pos(&self) -> bool;
    fn is_pivot(&self) -> bool {
        self.is_pos()
    }
    fn is_zero_val(&self) -> bool;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_pos(&self) -> bool {
        *self > 1e-9
    }
    fn is_pivot(&self) -> bool {
        *self > 1e-9
    }
    fn is_zero_val(&self) -> bool {
        self.abs() <= 1e-12
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_zero_val(&self) -> bool {
        Zero::is_zero(self)
    }
}

pub struct Simplex<T> {
    /// Tableau rows; columns `0..m` are the slacks, then structural columns.
    tab: Vec<Vec<T>>,
    rhs: Vec<T>,
    /// Reduced costs `c_j - z_j`.
    reduced: Vec<T>,
    basis: Vec<usize>,
    objective: T,
    pub max_pivots: usize,
}

impl<T: LpScalar> Simplex<T> {
    pub fn new(rhs: Vec<T>) -> Self {
        let m = rhs.len();
        let tab = (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| if r == c { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        Simplex {
            tab,
            rhs,
            reduced: vec![T::zero(); m],
            basis: (0..m).collect(),
            objective: T::zero(),
            max_pivots: 100_000,
        }
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn structural(&self) -> usize {
        self.reduced.len() - self.rows()
    }

    /// Adds a column given by sparse `(row, coefficient)` entries and returns
    /// its structural index.
    pub fn add_column(&mut self, cost: T, entries: &[(usize, T)]) -> usize {
        let m = self.rows();
        let mut reduced = cost;
        let mut column = vec![T::zero(); m];
        for (row, a) in entries {
            // B^-1 sits in the slack block; slack reduced costs are minus the duals.
            reduced = reduced + a.clone() * self.reduced[*row].clone();
            for (r, col) in column.iter_mut().enumerate() {
                let t = &self.tab[r][*row];
                if !t.is_zero_val() {
                    *col = col.clone() + a.clone() * t.clone();
                }
            }
        }
        for (r, v) in column.into_iter().enumerate() {
            self.tab[r].push(v);
        }
        self.reduced.push(reduced);
        self.reduced.len() - 1 - m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tab[row][col].clone();
        for v in self.tab[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        let pivot_row = self.tab[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows() {
            if r == row {
                continue;
            }
            let factor = self.tab[r][col].clone();
            if factor.is_zero_val() {
                continue;
            }
            for (v, pv) in self.tab[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero_val() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
            self.tab[r][col] = T::zero();
            self.rhs[r] = self.rhs[r].clone() - factor * pivot_rhs.clone();
        }
        let factor = self.reduced[col].clone();
        for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
            if !pv.is_zero_val() {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
        self.reduced[col] = T::zero();
        self.objective = self.objective.clone() + factor * pivot_rhs;
        self.basis[row] = col;
    }

    pub fn solve(&mut self) -> Result<()> {
        let mut degenerate_streak = 0usize;
        for _ in 0..self.max_pivots {
            let bland = degenerate_streak > 30;
            let mut enter = None;
            for (j, d) in self.reduced.iter().enumerate() {
                if d.is_pos() {
                    match enter {
                        None => enter = Some(j),
                        Some(e) if !bland && *d > self.reduced[e] => enter = Some(j),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some(col) = enter else { return Ok(()) };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows() {
                let a = &self.tab[r][col];
                if !a.is_pivot() {
                    continue;
                }
                let ratio = self.rhs[r].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (!(ratio > *best) && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Invariant("linear program is unbounded".into()));
            };
            if ratio.is_pos() {
                degenerate_streak = 0;
            } else {
                degenerate_streak += 1;
            }
            self.pivot(row, col);
        }
        Err(Error::Invariant("simplex pivot limit reached".into()))
    }

    pub fn value(&self) -> T {
        self.objective.clone()
    }

    /// Values of the structural variables.
    pub fn primal(&self) -> Vec<T> {
        let m = self.rows();
        let mut x = vec![T::zero(); self.structural()];
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= m {
                x[b - m] = self.rhs[r].clone();
            }
        }
        x
    }

    /// Row duals.
    pub fn duals(&self) -> Vec<T> {
        self.reduced[..self.rows()].iter().map(|d| -d.clone()).collect()
    }
}
