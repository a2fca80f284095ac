//! Bounded-variable primal simplex over exact rationals.
//!
//! Dense tableau, Bland's rule for entering and leaving variables, phase one
//! with one artificial per row. Artificials are pinned to zero for phase two.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `min c^T x  s.t.  A x = b,  lo <= x <= hi` with finite bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLP {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContinuousOutcome {
    Feasible { point: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl RationalLP {
    pub fn validate(&self) -> Result<()> {
        let n = self.c.len();
        if self.lo.len() != n || self.hi.len() != n {
            return Err(Error::DimensionMismatch(
                "LP bounds and objective differ in length".into(),
            ));
        }
        if self.a.len() != self.b.len() || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("LP constraint matrix shape".into()));
        }
        if let Some(j) = (0..n).find(|&j| self.lo[j] > self.hi[j]) {
            return Err(Error::InvalidInput(format!("LP variable {j} has lo > hi")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

struct Tableau {
    /// `B^{-1} A` over all columns, artificials included.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    status: Vec<Status>,
    x: Vec<Rational>,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

enum Pivot {
    Optimal,
    Moved,
}

impl Tableau {
    fn reduced_cost(&self, c: &[Rational], j: usize) -> Rational {
        let mut d = c[j].clone();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &c[self.basis[i]];
            if !cb.is_zero() && !row[j].is_zero() {
                d -= cb * &row[j];
            }
        }
        d
    }

    fn iterate(&mut self, c: &[Rational]) -> Pivot {
        let n = self.x.len();
        let entering = (0..n).find_map(|j| {
            let d = match self.status[j] {
                Status::Basic => return None,
                _ if self.lo[j] == self.hi[j] => return None,
                _ => self.reduced_cost(c, j),
            };
            match self.status[j] {
                Status::Lower if d.is_negative() => Some((j, 1)),
                Status::Upper if d.is_positive() => Some((j, -1)),
                _ => None,
            }
        });
        let Some((j, dir)) = entering else {
            return Pivot::Optimal;
        };
        // Ratio test; `None` leaving row means a bound flip of `j`.
        let mut theta = &self.hi[j] - &self.lo[j];
        let mut leave: Option<(usize, Status)> = None;
        let mut leave_var = j;
        for (i, row) in self.rows.iter().enumerate() {
            let alpha = if dir > 0 { row[j].clone() } else { -row[j].clone() };
            if alpha.is_zero() {
                continue;
            }
            let bv = self.basis[i];
            let (limit, hit) = if alpha.is_positive() {
                ((&self.x[bv] - &self.lo[bv]) / &alpha, Status::Lower)
            } else {
                ((&self.hi[bv] - &self.x[bv]) / -alpha, Status::Upper)
            };
            if limit < theta || (limit == theta && bv < leave_var) {
                theta = limit;
                leave = Some((i, hit));
                leave_var = bv;
            }
        }
        let step = if dir > 0 { theta.clone() } else { -theta.clone() };
        if !step.is_zero() {
            self.x[j] += &step;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[j].is_zero() {
                    let bv = self.basis[i];
                    self.x[bv] -= &step * &row[j];
                }
            }
        }
        match leave {
            None => {
                self.status[j] = if dir > 0 { Status::Upper } else { Status::Lower };
            }
            Some((r, hit)) => {
                let old = self.basis[r];
                self.x[old] = if hit == Status::Lower {
                    self.lo[old].clone()
                } else {
                    self.hi[old].clone()
                };
                self.status[old] = hit;
                self.pivot(r, j);
                self.basis[r] = j;
                self.status[j] = Status::Basic;
            }
        }
        Pivot::Moved
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let factor = row[j].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
    }

    fn run(&mut self, c: &[Rational]) {
        while let Pivot::Moved = self.iterate(c) {}
    }
}

/// Exact optimal basic solution, or `Infeasible`.
pub fn lp_solve(lp: &RationalLP) -> Result<ContinuousOutcome> {
    lp.validate()?;
    let (m, n) = (lp.a.len(), lp.c.len());
    let mut x: Vec<Rational> = lp.lo.clone();
    let mut rows = Vec::with_capacity(m);
    let mut lo = lp.lo.clone();
    let mut hi = lp.hi.clone();
    for i in 0..m {
        let residual: Rational = &lp.b[i] - lp.a[i].iter().zip(&x).map(|(a, v)| a * v).sum::<Rational>();
        let flip = residual.is_negative();
        let mut row: Vec<Rational> = lp.a[i]
            .iter()
            .map(|a| if flip { -a.clone() } else { a.clone() })
            .collect();
        row.extend((0..m).map(|k| {
            if k == i {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        }));
        rows.push(row);
        let r = residual.abs();
        lo.push(Rational::zero());
        hi.push(r.clone());
        x.push(r);
    }
    let mut status = vec![Status::Lower; n];
    status.extend(std::iter::repeat_n(Status::Basic, m));
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        status,
        x,
        lo,
        hi,
    };

    let mut phase1 = vec![Rational::zero(); n];
    phase1.extend(std::iter::repeat_n(Rational::from_integer(1.into()), m));
    t.run(&phase1);
    if t.x[n..].iter().any(|v| !v.is_zero()) {
        return Ok(ContinuousOutcome::Infeasible);
    }
    for k in n..n + m {
        t.hi[k] = Rational::zero();
    }
    let mut phase2 = lp.c.clone();
    phase2.extend(std::iter::repeat_n(Rational::zero(), m));
    t.run(&phase2);
    let point: Vec<Rational> = t.x[..n].to_vec();
    let value = point.iter().zip(&lp.c).map(|(v, c)| v * c).sum();
    Ok(ContinuousOutcome::Feasible { point, value })
}
