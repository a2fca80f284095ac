//! Feasibility by augmentation from an unconstrained integer solution.

use num_bigint::BigInt;

use crate::error::Result;
use crate::linalg::IntVector;
use crate::objective::DirectedObjective;

/// Step oracle: an improving step for `h` from `z` within `[l, u]`.
pub(crate) type DirectedOracle<'a> =
    dyn FnMut(&DirectedObjective, &[BigInt], &[BigInt], &[BigInt]) -> Result<Option<IntVector>> + 'a;

/// Moves a solution of `E z = b` into `[l, u]`. Works in the widened box
/// `[min(l, z), max(u, z)]`, which shrinks towards `[l, u]` as coordinates
/// enter their range. Each out-of-range coordinate is pushed towards its
/// range by maximizing (or minimizing) it; if it gets stuck outside, the
/// system has no solution in `[l, u]`.
pub(crate) fn drive_into_box(
    mut z: IntVector,
    l: &[BigInt],
    u: &[BigInt],
    step: &mut DirectedOracle,
) -> Result<Option<IntVector>> {
    let dim = z.len();
    loop {
        let Some(i) = (0..dim).find(|&i| z[i] < l[i] || z[i] > u[i]) else {
            return Ok(Some(z));
        };
        let below = z[i] < l[i];
        let h = DirectedObjective::coordinate(dim, i, below);
        loop {
            let wl: IntVector = z.iter().zip(l).map(|(a, b)| a.min(b).clone()).collect();
            let wu: IntVector = z.iter().zip(u).map(|(a, b)| a.max(b).clone()).collect();
            match step(&h, &z, &wl, &wu)? {
                Some(v) => {
                    for (a, b) in z.iter_mut().zip(&v) {
                        *a += b;
                    }
                    if (below && z[i] >= l[i]) || (!below && z[i] <= u[i]) {
                        break;
                    }
                }
                None => return Ok(None),
            }
        }
    }
}
