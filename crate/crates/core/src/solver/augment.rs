//! Graver-best and directed augmentation steps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graver::GraverBasis;
use crate::linalg::IntVector;
use crate::objective::{DirectedObjective, SeparableObjective, StepCost};
use crate::rational::Rational;

/// An improving step `v` with cost change `delta < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub v: IntVector,
    pub delta: Rational,
    pub gamma: BigInt,
}

/// Largest `gamma >= 0` with `l <= z + gamma g <= u`; `None` for `g = 0`.
pub fn max_multiple(z: &[BigInt], g: &[BigInt], l: &[BigInt], u: &[BigInt]) -> Option<BigInt> {
    let mut best: Option<BigInt> = None;
    for i in 0..g.len() {
        let limit = if g[i].is_positive() {
            (&u[i] - &z[i]).div_floor(&g[i])
        } else if g[i].is_negative() {
            (&z[i] - &l[i]).div_floor(&-&g[i])
        } else {
            continue;
        };
        best = Some(match best {
            Some(b) if b <= limit => b,
            _ => limit,
        });
    }
    best.map(|b| b.max(BigInt::zero()))
}

fn scaled(g: &[BigInt], gamma: &BigInt) -> IntVector {
    g.iter().map(|x| x * gamma).collect()
}

/// Smallest minimizer of `gamma -> cost(z + gamma g) - cost(z)` over
/// `1..=gamma_max`, by bisection on the convex sequence of differences.
pub fn best_multiple<C: StepCost + ?Sized>(
    cost: &C,
    z: &[BigInt],
    g: &[BigInt],
    gamma_max: &BigInt,
) -> (BigInt, Rational) {
    let phi = |gamma: &BigInt| cost.delta(z, &scaled(g, gamma));
    let (mut lo, mut hi) = (BigInt::one(), gamma_max.clone());
    while lo < hi {
        let mid: BigInt = (&lo + &hi) / 2;
        if phi(&(&mid + 1)) < phi(&mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let value = phi(&lo);
    (lo, value)
}

/// The best improving `gamma g` over all `g` in `elements`, ties broken by
/// smaller `gamma` and then by the order of `elements`.
pub fn best_graver_move<C: StepCost + ?Sized>(
    elements: &[IntVector],
    cost: &C,
    z: &[BigInt],
    l: &[BigInt],
    u: &[BigInt],
) -> Option<Move> {
    let mut best: Option<Move> = None;
    for g in elements {
        let Some(gamma_max) = max_multiple(z, g, l, u) else {
            continue;
        };
        if gamma_max.is_zero() {
            continue;
        }
        let (gamma, delta) = best_multiple(cost, z, g, &gamma_max);
        if !delta.is_negative() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => delta < b.delta || (delta == b.delta && gamma < b.gamma),
        };
        if better {
            best = Some(Move {
                v: scaled(g, &gamma),
                delta,
                gamma,
            });
        }
    }
    best
}

pub(crate) fn check_in_box(z: &[BigInt], l: &[BigInt], u: &[BigInt]) -> Result<()> {
    if z.len() != l.len() || z.len() != u.len() {
        return Err(Error::DimensionMismatch("point and box differ in length".into()));
    }
    match (0..z.len()).find(|&i| z[i] < l[i] || z[i] > u[i]) {
        Some(i) => Err(Error::InfeasiblePoint(format!("coordinate {i} is outside the box"))),
        None => Ok(()),
    }
}

/// Graver-best step for `f` from `z`: the feasible `gamma g` minimizing
/// `f(z + gamma g)`, returned with that value, or `None` when no step
/// improves on `f(z)`.
pub fn graver_best_step(
    basis: &GraverBasis,
    z: &[BigInt],
    f: &SeparableObjective,
    l: &[BigInt],
    u: &[BigInt],
) -> Result<Option<(IntVector, Rational)>> {
    check_in_box(z, l, u)?;
    if f.dim() != z.len() || basis.matrix().cols() != z.len() {
        return Err(Error::DimensionMismatch("objective, basis and point differ".into()));
    }
    let Some(mv) = best_graver_move(basis.elements(), f, z, l, u) else {
        return Ok(None);
    };
    let next: IntVector = z.iter().zip(&mv.v).map(|(a, b)| a + b).collect();
    let value = f.evaluate_int(&next)?;
    Ok(Some((mv.v, value)))
}

/// A feasible multiple of a Graver element with `h(v) < 0`, the most
/// negative one available.
pub fn directed_step(
    basis: &GraverBasis,
    z: &[BigInt],
    h: &DirectedObjective,
    l: &[BigInt],
    u: &[BigInt],
) -> Result<Option<IntVector>> {
    check_in_box(z, l, u)?;
    if h.dim() != z.len() || basis.matrix().cols() != z.len() {
        return Err(Error::DimensionMismatch("objective, basis and point differ".into()));
    }
    Ok(best_graver_move(basis.elements(), h, z, l, u).map(|m| m.v))
}
