//! Graver bases: completion from a kernel lattice basis, an enumeration
//! oracle, expansion under repeated columns and conformal decomposition.
//!
//! A nonzero kernel vector `v` is *primitive* when no nonzero kernel vector
//! `w != v` satisfies `w ⊑ v`, where `w ⊑ v` means `w` lies in the orthant of
//! `v` and `|w_i| <= |v_i|` for every coordinate. The Graver basis is the set
//! of primitive vectors.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{kernel_lattice_basis, IntMatrix, IntVector};

/// Largest column count accepted by [`graver_completion`].
pub const COMPLETION_MAX_COLUMNS: usize = 12;
/// Largest number of vectors the completion may hold before giving up.
pub const COMPLETION_MAX_ELEMENTS: usize = 60_000;
/// Largest column count accepted by [`graver_brute_force`].
pub const BRUTE_FORCE_MAX_COLUMNS: usize = 6;
/// Bound on `(2 * radius + 1)^(n - rank)` for [`graver_brute_force`].
pub const BRUTE_FORCE_MAX_LATTICE: u128 = 20_000_000;

/// The Graver basis of a matrix, stored as a lexicographically sorted,
/// sign-symmetric set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverBasis {
    matrix: IntMatrix,
    elements: Vec<IntVector>,
    max_l1: BigInt,
    max_linf: BigInt,
}

impl GraverBasis {
    /// Canonicalizes `elements` (sorts, deduplicates) and computes norms.
    /// Does not check primitivity.
    pub fn from_elements(matrix: IntMatrix, elements: impl IntoIterator<Item = IntVector>) -> Self {
        let set: BTreeSet<IntVector> = elements.into_iter().collect();
        let elements: Vec<IntVector> = set.into_iter().collect();
        let max_l1 = elements.iter().map(|v| l1_norm(v)).max().unwrap_or_else(BigInt::zero);
        let max_linf = elements.iter().map(|v| linf_norm(v)).max().unwrap_or_else(BigInt::zero);
        GraverBasis {
            matrix,
            elements,
            max_l1,
            max_linf,
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn elements(&self) -> &[IntVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_l1(&self) -> &BigInt {
        &self.max_l1
    }

    pub fn max_linf(&self) -> &BigInt {
        &self.max_linf
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        self.elements.binary_search(v).is_ok()
    }
}

pub fn l1_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

pub fn linf_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

/// `w ⊑ v`: same orthant and componentwise no larger in absolute value.
pub fn conformally_below(w: &[BigInt], v: &[BigInt]) -> bool {
    w.iter()
        .zip(v)
        .all(|(a, b)| a.is_zero() || (a.signum() == b.signum() && a.abs() <= b.abs()))
}

pub fn sign_compatible(w: &[BigInt], v: &[BigInt]) -> bool {
    w.iter()
        .zip(v)
        .all(|(a, b)| a.is_zero() || b.is_zero() || a.signum() == b.signum())
}

/// Working vector for the `i64` enumeration and completion loops.
#[derive(Clone, Debug)]
struct Packed {
    v: Vec<i64>,
    pos: u64,
    neg: u64,
    l1: i64,
}

impl Packed {
    fn new(v: Vec<i64>) -> Self {
        let mut pos = 0u64;
        let mut neg = 0u64;
        let mut l1 = 0i64;
        for (i, &x) in v.iter().enumerate() {
            if x > 0 {
                pos |= 1 << i;
            } else if x < 0 {
                neg |= 1 << i;
            }
            l1 += x.abs();
        }
        Packed { v, pos, neg, l1 }
    }

    fn is_zero(&self) -> bool {
        self.pos == 0 && self.neg == 0
    }

    /// `self ⊑ other`
    fn below(&self, other: &Packed) -> bool {
        self.pos & !other.pos == 0
            && self.neg & !other.neg == 0
            && self.l1 <= other.l1
            && self.v.iter().zip(&other.v).all(|(a, b)| a.abs() <= b.abs())
    }

    fn sign_compatible(&self, other: &Packed) -> bool {
        self.pos & other.neg == 0 && self.neg & other.pos == 0
    }

    fn to_big(&self) -> IntVector {
        self.v.iter().map(|&x| BigInt::from(x)).collect()
    }
}

fn checked_sum(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("Graver completion")))
        .collect()
}

/// Reduces `s` by `g ⊑ s` until no element of `set` lies below it.
fn normal_form(mut s: Packed, set: &[Packed]) -> Packed {
    'outer: while !s.is_zero() {
        for g in set {
            if g.below(&s) {
                // largest multiple that stays below s
                let k =
                    g.v.iter()
                        .zip(&s.v)
                        .filter(|(a, _)| **a != 0)
                        .map(|(a, b)| b.abs() / a.abs())
                        .min()
                        .unwrap_or(1);
                let v = s.v.iter().zip(&g.v).map(|(x, y)| x - k * y).collect();
                s = Packed::new(v);
                continue 'outer;
            }
        }
        break;
    }
    s
}

/// Keeps only the ⊑-minimal vectors.
fn minimal_elements(mut candidates: Vec<Packed>) -> Vec<Packed> {
    candidates.sort_by(|a, b| a.l1.cmp(&b.l1).then_with(|| a.v.cmp(&b.v)));
    let mut kept: Vec<Packed> = Vec::new();
    for c in candidates {
        if c.is_zero() || kept.iter().any(|k| k.below(&c)) {
            continue;
        }
        kept.push(c);
    }
    kept
}

/// Computes the Graver basis by completion: start from a symmetric lattice
/// generating set, add the normal forms of all sums of sign-incompatible
/// pairs until closure, then keep the ⊑-minimal vectors.
pub fn graver_completion(e: &IntMatrix) -> Result<GraverBasis> {
    let n = e.cols();
    if n > COMPLETION_MAX_COLUMNS {
        return Err(Error::SizeGuardExceeded(format!(
            "Graver completion limited to {COMPLETION_MAX_COLUMNS} columns, got {n}"
        )));
    }
    let lattice = kernel_lattice_basis(e);
    let mut set: Vec<Packed> = Vec::new();
    for b in &lattice {
        let v: Vec<i64> = b
            .iter()
            .map(|x| x.to_i64().ok_or(Error::Overflow("kernel basis conversion")))
            .collect::<Result<_>>()?;
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        for w in [v, neg] {
            let p = normal_form(Packed::new(w), &set);
            if !p.is_zero() {
                set.push(p);
            }
        }
    }
    // pairs ordered by the 1-norm of their sum, smallest first
    let mut queue: BinaryHeap<Reverse<(i64, usize, usize)>> = BinaryHeap::new();
    let push_pairs = |queue: &mut BinaryHeap<Reverse<(i64, usize, usize)>>, set: &[Packed], j: usize| -> Result<()> {
        for i in 0..j {
            if set[i].sign_compatible(&set[j]) {
                continue;
            }
            let l1 = checked_sum(&set[i].v, &set[j].v)?.iter().map(|x| x.abs()).sum();
            queue.push(Reverse((l1, i, j)));
        }
        Ok(())
    };
    for j in 0..set.len() {
        push_pairs(&mut queue, &set, j)?;
    }
    while let Some(Reverse((_, i, j))) = queue.pop() {
        let s = Packed::new(checked_sum(&set[i].v, &set[j].v)?);
        let r = normal_form(s, &set);
        if r.is_zero() {
            continue;
        }
        set.push(r);
        if set.len() > COMPLETION_MAX_ELEMENTS {
            return Err(Error::SizeGuardExceeded(format!(
                "Graver completion exceeded {COMPLETION_MAX_ELEMENTS} intermediate vectors"
            )));
        }
        push_pairs(&mut queue, &set, set.len() - 1)?;
    }
    let elements = minimal_elements(set).iter().map(Packed::to_big).collect::<Vec<_>>();
    Ok(GraverBasis::from_elements(e.clone(), elements))
}

/// Enumeration oracle: all nonzero kernel vectors with `|v|_inf <= radius`,
/// filtered to the ⊑-minimal ones. Equals the Graver basis whenever `radius`
/// is at least the largest entry of a Graver element.
pub fn graver_brute_force(e: &IntMatrix, radius: i64) -> Result<GraverBasis> {
    let n = e.cols();
    if radius < 1 {
        return Err(Error::InvalidInput("radius must be at least 1".into()));
    }
    if n > BRUTE_FORCE_MAX_COLUMNS {
        return Err(Error::SizeGuardExceeded(format!(
            "Graver enumeration limited to {BRUTE_FORCE_MAX_COLUMNS} columns, got {n}"
        )));
    }
    let free = (n - e.rank()) as u32;
    let side = 2 * radius as u128 + 1;
    if side.checked_pow(free).is_none_or(|c| c > BRUTE_FORCE_MAX_LATTICE) {
        return Err(Error::SizeGuardExceeded(format!(
            "Graver enumeration of radius {radius} over a {free}-dimensional kernel is too large"
        )));
    }
    let rows = e.to_i64_rows()?;
    let kernel = enumerate_box_solutions(&rows, &vec![0; rows.len()], &vec![-radius; n], &vec![radius; n])?;
    let packed = kernel.into_iter().map(Packed::new).filter(|p| !p.is_zero()).collect();
    let elements = minimal_elements(packed).iter().map(Packed::to_big).collect::<Vec<_>>();
    Ok(GraverBasis::from_elements(e.clone(), elements))
}

/// All integer `z` with `rows * z = rhs` and `lo <= z <= hi`, in
/// lexicographic order. Depth-first search that prunes any partial
/// assignment whose residual can no longer be met by the remaining
/// coordinates.
pub(crate) fn enumerate_box_solutions(rows: &[Vec<i64>], rhs: &[i64], lo: &[i64], hi: &[i64]) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    let mut search = BoxSearch::new(rows, rhs, lo, hi)?;
    search.run(&mut |z| out.push(z.to_vec()));
    Ok(out)
}

pub(crate) struct BoxSearch<'a> {
    rows: &'a [Vec<i64>],
    lo: &'a [i64],
    hi: &'a [i64],
    /// `rem_min[k][r]`, `rem_max[k][r]`: range of row `r` over coordinates `k..`.
    rem_min: Vec<Vec<i128>>,
    rem_max: Vec<Vec<i128>>,
    residual: Vec<i128>,
    z: Vec<i64>,
}

impl<'a> BoxSearch<'a> {
    pub(crate) fn new(rows: &'a [Vec<i64>], rhs: &[i64], lo: &'a [i64], hi: &'a [i64]) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || rhs.len() != rows.len() || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("box search dimensions".into()));
        }
        let m = rows.len();
        let mut rem_min = vec![vec![0i128; m]; n + 1];
        let mut rem_max = vec![vec![0i128; m]; n + 1];
        for k in (0..n).rev() {
            for r in 0..m {
                let a = rows[r][k] as i128;
                let (x, y) = (a * lo[k] as i128, a * hi[k] as i128);
                rem_min[k][r] = rem_min[k + 1][r] + x.min(y);
                rem_max[k][r] = rem_max[k + 1][r] + x.max(y);
            }
        }
        Ok(BoxSearch {
            rows,
            lo,
            hi,
            rem_min,
            rem_max,
            residual: rhs.iter().map(|&x| x as i128).collect(),
            z: vec![0; n],
        })
    }

    pub(crate) fn run(&mut self, visit: &mut dyn FnMut(&[i64])) {
        if self.lo.iter().zip(self.hi).any(|(l, h)| l > h) {
            return;
        }
        if self.feasible_from(0) {
            self.descend(0, visit);
        }
    }

    fn feasible_from(&self, k: usize) -> bool {
        (0..self.rows.len()).all(|r| self.rem_min[k][r] <= self.residual[r] && self.residual[r] <= self.rem_max[k][r])
    }

    /// Values of coordinate `k` that keep every row within reach of the
    /// coordinates after it.
    fn range(&self, k: usize) -> (i64, i64) {
        let (mut lo, mut hi) = (self.lo[k] as i128, self.hi[k] as i128);
        for r in 0..self.rows.len() {
            let a = self.rows[r][k] as i128;
            if a == 0 {
                continue;
            }
            // residual - a x must lie in [rem_min, rem_max] of the tail
            let (p, q) = (
                self.residual[r] - self.rem_max[k + 1][r],
                self.residual[r] - self.rem_min[k + 1][r],
            );
            let (p, q) = if a > 0 { (p, q) } else { (q, p) };
            lo = lo.max(Integer::div_ceil(&p, &a));
            hi = hi.min(Integer::div_floor(&q, &a));
        }
        (lo as i64, hi as i64)
    }

    fn descend(&mut self, k: usize, visit: &mut dyn FnMut(&[i64])) {
        if k == self.z.len() {
            visit(&self.z);
            return;
        }
        let (lo, hi) = self.range(k);
        for x in lo..=hi {
            self.z[k] = x;
            for r in 0..self.rows.len() {
                self.residual[r] -= self.rows[r][k] as i128 * x as i128;
            }
            self.descend(k + 1, visit);
            for r in 0..self.rows.len() {
                self.residual[r] += self.rows[r][k] as i128 * x as i128;
            }
        }
    }
}

/// Graver basis of `(F f f)` from the Graver basis of `(F f)`, where `f` is
/// column `repeat_index`; the copy is inserted right after it.
pub fn expand_repeated_columns(basis: &GraverBasis, repeat_index: usize) -> Result<GraverBasis> {
    let n = basis.matrix().cols();
    if repeat_index >= n {
        return Err(Error::InvalidInput(format!(
            "column {repeat_index} out of range for a matrix with {n} columns"
        )));
    }
    let matrix = basis.matrix().with_repeated_column(repeat_index)?;
    let splice = |g: &IntVector, first: BigInt, second: BigInt| -> IntVector {
        let mut v = Vec::with_capacity(n + 1);
        v.extend_from_slice(&g[..repeat_index]);
        v.push(first);
        v.push(second);
        v.extend_from_slice(&g[repeat_index + 1..]);
        v
    };
    let mut out = Vec::new();
    for g in basis.elements() {
        let c = &g[repeat_index];
        let sign = c.signum();
        let mut part = BigInt::zero();
        // all splittings c = v + w with v * w >= 0
        while part.abs() <= c.abs() {
            out.push(splice(g, part.clone(), c - &part));
            if sign.is_zero() {
                break;
            }
            part += &sign;
        }
    }
    let mut unit = vec![BigInt::zero(); n + 1];
    unit[repeat_index] = BigInt::from(1);
    unit[repeat_index + 1] = BigInt::from(-1);
    out.push(unit.iter().map(|x| -x).collect());
    out.push(unit);
    Ok(GraverBasis::from_elements(matrix, out))
}

/// A positive integer combination of basis elements, each conformal to the
/// target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalDecomposition {
    pub target: IntVector,
    pub terms: Vec<(BigInt, IntVector)>,
}

impl ConformalDecomposition {
    pub fn reassemble(&self) -> IntVector {
        let mut sum = vec![BigInt::zero(); self.target.len()];
        for (k, g) in &self.terms {
            for (s, x) in sum.iter_mut().zip(g) {
                *s += k * x;
            }
        }
        sum
    }
}

/// Greedy conformal decomposition: repeatedly takes the lexicographically
/// smallest basis element `g ⊑ v` and subtracts the largest multiple that
/// keeps the remainder in the orthant of `v`.
pub fn conformal_decompose(v: &[BigInt], basis: &GraverBasis) -> Result<ConformalDecomposition> {
    let e = basis.matrix();
    if e.mul_vec(v)?.iter().any(|x| !x.is_zero()) {
        return Err(Error::NotInKernel);
    }
    let mut rest = v.to_vec();
    let mut terms = Vec::new();
    while rest.iter().any(|x| !x.is_zero()) {
        let g = basis
            .elements()
            .iter()
            .find(|g| conformally_below(g, &rest))
            .ok_or_else(|| Error::DecompositionFailed(format!("no basis element below {rest:?}")))?;
        let k = g
            .iter()
            .zip(&rest)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, b)| b.abs() / a.abs())
            .min()
            .expect("basis elements are nonzero");
        for (r, x) in rest.iter_mut().zip(g) {
            *r -= &k * x;
        }
        terms.push((k, g.clone()));
    }
    Ok(ConformalDecomposition {
        target: v.to_vec(),
        terms,
    })
}
