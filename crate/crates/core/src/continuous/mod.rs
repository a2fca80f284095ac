//! Continuous relaxation oracle.
//!
//! The objective is replaced by its piecewise-linear interpolant on a grid
//! whose step divides 1, so every integer is a breakpoint and the surrogate
//! agrees with `f` on all integer points. The surrogate relaxation is solved
//! exactly as an LP with one bounded variable per grid segment.

mod simplex;

pub use simplex::{lp_solve, ContinuousOutcome, RationalLP};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fourblock::FourBlockInstance;
use crate::rational::{int_rat, Rational};

/// Largest `1/k <= min(eps, 1/2)`.
pub fn grid_step(eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let cap = eps.clone().min(half);
    let k = Integer::div_ceil(cap.denom(), cap.numer());
    Ok(Rational::new(BigInt::one(), k))
}

/// Minimizes the piecewise-linear surrogate of `f` with grid step `step`
/// (which must divide 1) over `{ E z = b, l <= z <= u }`. The returned value
/// is the surrogate optimum.
pub fn pl_relaxation(instance: &FourBlockInstance, step: &Rational) -> Result<ContinuousOutcome> {
    instance.validate()?;
    if !step.is_positive() || !step.numer().is_one() {
        return Err(Error::InvalidInput("grid step must be 1/k".into()));
    }
    let n = instance.dim();
    let e = instance.matrix();
    let lo: Vec<Rational> = instance.l.iter().map(int_rat).collect();
    let hi: Vec<Rational> = instance.u.iter().map(int_rat).collect();
    let pl = instance.objective.piecewise_linearize(&lo, &hi, step)?;

    // Column k of the LP is segment `seg` of coordinate `owner`.
    let mut owner = Vec::new();
    let mut c = Vec::new();
    let mut var_hi = Vec::new();
    for (i, coord) in pl.iter().enumerate() {
        for (s, slope) in coord.slopes.iter().enumerate() {
            owner.push(i);
            c.push(slope.clone());
            var_hi.push(&coord.breakpoints[s + 1] - &coord.breakpoints[s]);
        }
    }
    let cols = owner.len();
    let mut a = Vec::with_capacity(e.rows());
    let mut b = Vec::with_capacity(e.rows());
    for r in 0..e.rows() {
        let row: Vec<Rational> = owner.iter().map(|&i| int_rat(e.get(r, i))).collect();
        let shift: Rational = (0..n).map(|i| int_rat(e.get(r, i)) * &lo[i]).sum();
        a.push(row);
        b.push(int_rat(&instance.rhs[r]) - shift);
    }
    let lp = RationalLP {
        a,
        b,
        lo: vec![Rational::zero(); cols],
        hi: var_hi,
        c,
    };
    match lp_solve(&lp)? {
        ContinuousOutcome::Feasible { point: deltas, value } => {
            let mut point = lo.clone();
            for (k, d) in deltas.iter().enumerate() {
                point[owner[k]] += d;
            }
            let base: Rational = pl.iter().map(|coord| coord.values[0].clone()).sum();
            Ok(ContinuousOutcome::Feasible {
                point,
                value: base + value,
            })
        }
        other => Ok(other),
    }
}

/// A point minimizing the piecewise-linear surrogate with step
/// [`grid_step`]`(eps)`.
pub fn approx_continuous_oracle(instance: &FourBlockInstance, eps: &Rational) -> Result<ContinuousOutcome> {
    pl_relaxation(instance, &grid_step(eps)?)
}
