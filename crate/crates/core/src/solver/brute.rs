//! Exhaustive reference solver for small boxes.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fourblock::FourBlockInstance;
use crate::graver::BoxSearch;
use crate::linalg::IntVector;
use crate::rational::Rational;

use super::{SolveOutcome, SolveStatus};

/// Largest number of lattice points in the box that may be enumerated.
pub const BRUTE_FORCE_MAX_POINTS: u128 = 10_000_000;

fn to_i64(v: &BigInt) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow("brute force needs 64-bit data"))
}

fn lattice_size(instance: &FourBlockInstance) -> u128 {
    instance
        .l
        .iter()
        .zip(&instance.u)
        .map(|(l, u)| u128::try_from(u - l + 1).unwrap_or(u128::MAX))
        .fold(1u128, |acc, w| acc.saturating_mul(w))
}

/// Calls `visit` on every feasible point in lexicographic order.
pub fn for_each_feasible(instance: &FourBlockInstance, visit: &mut dyn FnMut(&[i64])) -> Result<()> {
    instance.validate()?;
    let size = lattice_size(instance);
    if size > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::SizeGuardExceeded(format!("box has {size} lattice points")));
    }
    let e = instance.matrix();
    let rows = e.to_i64_rows()?;
    let rhs = instance.rhs.iter().map(to_i64).collect::<Result<Vec<_>>>()?;
    let lo = instance.l.iter().map(to_i64).collect::<Result<Vec<_>>>()?;
    let hi = instance.u.iter().map(to_i64).collect::<Result<Vec<_>>>()?;
    let mut search = BoxSearch::new(&rows, &rhs, &lo, &hi)?;
    search.run(visit);
    Ok(())
}

pub fn enumerate_feasible(instance: &FourBlockInstance) -> Result<Vec<IntVector>> {
    let mut out = Vec::new();
    for_each_feasible(instance, &mut |z| {
        out.push(z.iter().map(|&x| BigInt::from(x)).collect())
    })?;
    Ok(out)
}

/// Exact optimum by enumeration; the lexicographically smallest optimal
/// point is returned.
pub fn brute_force_solve(instance: &FourBlockInstance) -> Result<SolveOutcome> {
    instance.validate()?;
    let tables: Vec<Vec<Rational>> = (0..instance.dim())
        .map(|i| {
            let lo = to_i64(&instance.l[i])?;
            let hi = to_i64(&instance.u[i])?;
            Ok((lo..=hi)
                .map(|x| instance.objective.coordinate_value_int(i, &BigInt::from(x)))
                .collect())
        })
        .collect::<Result<_>>()?;
    let lo: Vec<i64> = instance.l.iter().map(to_i64).collect::<Result<_>>()?;
    let mut best: Option<(Rational, Vec<i64>)> = None;
    for_each_feasible(instance, &mut |z| {
        let value: Rational = z
            .iter()
            .enumerate()
            .map(|(i, &x)| &tables[i][(x - lo[i]) as usize])
            .sum();
        if best.as_ref().is_none_or(|(b, _)| &value < b) {
            best = Some((value, z.to_vec()));
        }
    })?;
    let status = match best {
        Some((value, z)) => SolveStatus::Optimal {
            z: z.into_iter().map(BigInt::from).collect(),
            value,
        },
        None => SolveStatus::Infeasible,
    };
    Ok(SolveOutcome {
        status,
        trail: Vec::new(),
        restricted_box: None,
        proximity: None,
    })
}
