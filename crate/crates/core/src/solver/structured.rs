//! Augmentation step that enumerates first-stage moves and solves the
//! remaining N-fold problem in the second-stage variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::fourblock::FourBlockInstance;
use crate::graver::{graver_completion, GraverBasis};
use crate::linalg::{HermiteSystem, IntMatrix, IntVector};
use crate::objective::{DirectedObjective, SeparableObjective, StepCost};
use crate::rational::Rational;

use super::augment::{best_graver_move, check_in_box, Move};
use super::phase_one::drive_into_box;

/// Upper limit on the number of first-stage moves tried per step.
pub const MAX_FIRST_STAGE_CANDIDATES: u64 = 1_000_000;

/// Data shared by all structured steps on one instance.
#[derive(Clone, Debug)]
pub struct StructuredContext {
    n_b: usize,
    /// Columns of `E` belonging to the first-stage variables.
    x_columns: IntMatrix,
    rhs: IntVector,
    nfold_basis: GraverBasis,
    nfold_system: HermiteSystem,
    xbar_l1_bound: Option<BigInt>,
}

/// The cost of second-stage variables relative to a fixed origin `z`:
/// moving `y_j` by `v_j` changes the outer cost by the difference of the
/// outer deltas measured from `z`.
struct SubCost<'a, C: ?Sized> {
    base: &'a C,
    origin: &'a [BigInt],
    offset: usize,
    dim: usize,
}

impl<C: StepCost + ?Sized> SubCost<'_, C> {
    fn delta_from_origin(&self, j: usize, y: &BigInt) -> Rational {
        let z = &self.origin[self.offset + j];
        self.base.coordinate_delta(self.offset + j, z, &(y - z))
    }
}

impl<C: StepCost + ?Sized> StepCost for SubCost<'_, C> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn coordinate_delta(&self, j: usize, yj: &BigInt, vj: &BigInt) -> Rational {
        self.delta_from_origin(j, &(yj + vj)) - self.delta_from_origin(j, yj)
    }
}

fn first_stage_columns(e: &IntMatrix, n_b: usize) -> IntMatrix {
    let mut x = IntMatrix::zeros(e.rows(), n_b);
    for r in 0..e.rows() {
        for j in 0..n_b {
            x.set(r, j, e.get(r, j).clone());
        }
    }
    x
}

impl StructuredContext {
    /// Computes the Graver basis of the N-fold part. `xbar_l1_bound` limits
    /// the 1-norm of primitive first-stage directions; `None` tries every
    /// first-stage move in the box.
    pub fn new(instance: &FourBlockInstance, xbar_l1_bound: Option<BigInt>) -> Result<Self> {
        let nfold_basis = graver_completion(&instance.nfold_part())?;
        Self::with_basis(instance, nfold_basis, xbar_l1_bound)
    }

    pub fn with_basis(
        instance: &FourBlockInstance,
        nfold_basis: GraverBasis,
        xbar_l1_bound: Option<BigInt>,
    ) -> Result<Self> {
        instance.validate()?;
        let nfold = instance.nfold_part();
        if nfold_basis.matrix() != &nfold {
            return Err(Error::InvalidInput("basis does not belong to the N-fold part".into()));
        }
        Ok(StructuredContext {
            n_b: instance.n_b(),
            x_columns: first_stage_columns(&instance.matrix(), instance.n_b()),
            rhs: instance.rhs.clone(),
            nfold_system: HermiteSystem::new(&nfold),
            nfold_basis,
            xbar_l1_bound,
        })
    }

    pub fn nfold_basis(&self) -> &GraverBasis {
        &self.nfold_basis
    }

    pub fn xbar_l1_bound(&self) -> Option<&BigInt> {
        self.xbar_l1_bound.as_ref()
    }

    /// Nonzero first-stage moves `w` with `l_x <= z_x + w <= u_x` whose
    /// primitive direction `w / gcd(w)` respects the 1-norm bound.
    fn first_stage_moves(&self, z: &[BigInt], l: &[BigInt], u: &[BigInt]) -> Result<Vec<IntVector>> {
        let n_b = self.n_b;
        let lo: Vec<BigInt> = (0..n_b).map(|i| &l[i] - &z[i]).collect();
        let hi: Vec<BigInt> = (0..n_b).map(|i| &u[i] - &z[i]).collect();
        let mut count: u64 = 1;
        for i in 0..n_b {
            let width = u64::try_from(&hi[i] - &lo[i] + 1).unwrap_or(u64::MAX);
            count = count.saturating_mul(width);
        }
        if count > MAX_FIRST_STAGE_CANDIDATES {
            return Err(Error::SizeGuardExceeded(format!(
                "{count} first-stage moves to enumerate"
            )));
        }
        let mut out = Vec::new();
        if n_b == 0 {
            return Ok(out);
        }
        let mut w = lo.clone();
        loop {
            if w.iter().any(|x| !x.is_zero()) {
                let keep = match &self.xbar_l1_bound {
                    None => true,
                    Some(bound) => {
                        let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                        let l1: BigInt = w.iter().map(|x| x.abs()).sum();
                        &(l1 / g) <= bound
                    }
                };
                if keep {
                    out.push(w.clone());
                }
            }
            let mut k = n_b;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                if w[k] < hi[k] {
                    w[k] += 1;
                    break;
                }
                w[k] = lo[k].clone();
            }
        }
    }

    /// Flat feasibility and optimization in the second-stage variables with
    /// the first stage fixed to `x`. Returns the optimal `y`.
    fn solve_second_stage<C: StepCost + ?Sized>(
        &self,
        cost: &SubCost<'_, C>,
        x: &[BigInt],
        l: &[BigInt],
        u: &[BigInt],
    ) -> Result<Option<IntVector>> {
        let shift = self.x_columns.mul_vec(x)?;
        let rhs: IntVector = self.rhs.iter().zip(&shift).map(|(b, s)| b - s).collect();
        let Some(y0) = self.nfold_system.solve(&rhs)? else {
            return Ok(None);
        };
        let elements = self.nfold_basis.elements();
        let mut oracle = |h: &DirectedObjective, y: &[BigInt], wl: &[BigInt], wu: &[BigInt]| {
            Ok(best_graver_move(elements, h, y, wl, wu).map(|m| m.v))
        };
        let Some(mut y) = drive_into_box(y0, l, u, &mut oracle)? else {
            return Ok(None);
        };
        while let Some(m) = best_graver_move(elements, cost, &y, l, u) {
            for (a, b) in y.iter_mut().zip(&m.v) {
                *a += b;
            }
        }
        Ok(Some(y))
    }

    /// Best improving structured step for `cost` from `z` within `[l, u]`;
    /// ties are broken by the lexicographically smallest step.
    pub fn best_move<C: StepCost + ?Sized>(
        &self,
        cost: &C,
        z: &[BigInt],
        l: &[BigInt],
        u: &[BigInt],
    ) -> Result<Option<Move>> {
        check_in_box(z, l, u)?;
        let n_b = self.n_b;
        let dim = z.len();
        let sub = SubCost {
            base: cost,
            origin: z,
            offset: n_b,
            dim: dim - n_b,
        };
        let (ly, uy) = (&l[n_b..], &u[n_b..]);
        let zy = &z[n_b..];

        let mut best: Option<Move> = None;
        let mut consider = |v: IntVector, delta: Rational, gamma: BigInt| {
            if !delta.is_negative() {
                return;
            }
            let better = match &best {
                None => true,
                Some(b) => delta < b.delta || (delta == b.delta && v < b.v),
            };
            if better {
                best = Some(Move { v, delta, gamma });
            }
        };

        if let Some(m) = best_graver_move(self.nfold_basis.elements(), &sub, zy, ly, uy) {
            let mut v = vec![BigInt::zero(); n_b];
            v.extend(m.v);
            consider(v, m.delta, m.gamma);
        }

        for w in self.first_stage_moves(z, l, u)? {
            let x: IntVector = z[..n_b].iter().zip(&w).map(|(a, b)| a + b).collect();
            let Some(y) = self.solve_second_stage(&sub, &x, ly, uy)? else {
                continue;
            };
            let mut delta: Rational = (0..n_b).map(|i| cost.coordinate_delta(i, &z[i], &w[i])).sum();
            delta += (0..dim - n_b)
                .map(|j| sub.delta_from_origin(j, &y[j]))
                .sum::<Rational>();
            let gamma = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let mut v = w;
            v.extend(y.iter().zip(zy).map(|(a, b)| a - b));
            consider(v, delta, gamma);
        }
        Ok(best)
    }
}

/// One structured augmentation step for `f`, returned with the new value
/// `f(z + v)`, or `None` when `z` cannot be improved.
pub fn structured_xbar_step(
    ctx: &StructuredContext,
    z: &[BigInt],
    f: &SeparableObjective,
    l: &[BigInt],
    u: &[BigInt],
) -> Result<Option<(IntVector, Rational)>> {
    if f.dim() != z.len() {
        return Err(Error::DimensionMismatch("objective and point differ".into()));
    }
    let Some(m) = ctx.best_move(f, z, l, u)? else {
        return Ok(None);
    };
    let next: IntVector = z.iter().zip(&m.v).map(|(a, b)| a + b).collect();
    let value = f.evaluate_int(&next)?;
    Ok(Some((m.v, value)))
}
