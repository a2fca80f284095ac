//! Exact integer linear algebra: Hermite normal form, integer system solving,
//! saturated kernel bases and subdeterminant enumeration.
//!
//! Everything here works on arbitrary-precision integers. The matrices this
//! crate deals with are small, so entry growth during column reduction is
//! accepted rather than controlled.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact integer vector.
pub type IntVector = Vec<BigInt>;

/// Largest `rows * cols` for which all minors are enumerated.
pub const SUBDETERMINANT_GUARD: usize = 36;

/// Dense exact-integer matrix in row-major layout.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from explicit rows. `cols` is needed to describe
    /// matrices without rows.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Convenience constructor for literal matrices. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> IntVector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<IntVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let s: BigInt = (0..self.cols).map(|k| self.get(r, k) * other.get(k, c)).sum();
                out.set(r, c, s);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    /// Returns a copy with column `c` duplicated directly after itself.
    pub fn with_repeated_column(&self, c: usize) -> Result<IntMatrix> {
        if c >= self.cols {
            return Err(Error::InvalidInput(format!("column {c} out of range")));
        }
        let mut out = IntMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for j in 0..=self.cols {
                let src = if j <= c { j } else { j - 1 };
                out.set(r, j, self.get(r, src).clone());
            }
        }
        Ok(out)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn distinct_column_count(&self) -> usize {
        (0..self.cols).map(|c| self.column(c)).unique().count()
    }

    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        Ok(bareiss_determinant(self.to_rows()))
    }

    pub fn rank(&self) -> usize {
        HermiteSystem::new(self).rank()
    }

    /// Entries as `i64`, failing on values that do not fit.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|x| x.to_i64().ok_or(Error::Overflow("matrix entry conversion")))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}", self.rows, self.cols)?;
        f.debug_list()
            .entries(self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).join(" ")))
            .finish()
    }
}

pub fn int_vec(values: &[i64]) -> IntVector {
    values.iter().map(|&x| BigInt::from(x)).collect()
}

/// Fraction-free Gaussian elimination.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Extended gcd with a nonnegative gcd: returns `(g, s, t)` with `s*a + t*b = g`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Column-style Hermite normal form of `m`: returns `(h, u)` with `m * u = h`,
/// `u` unimodular, `h` lower echelon with positive pivots and the entries left
/// of each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let sys = HermiteSystem::new(m);
    (sys.h, sys.u)
}

/// Integer solution of `e * z = b`, or `None` when none exists.
pub fn solve_integer(e: &IntMatrix, b: &[BigInt]) -> Result<Option<IntVector>> {
    HermiteSystem::new(e).solve(b)
}

/// Basis of the saturated lattice `ker(e) ∩ Z^n`; first nonzero entry of each
/// vector is positive.
pub fn kernel_lattice_basis(e: &IntMatrix) -> Vec<IntVector> {
    HermiteSystem::new(e).kernel_basis()
}

/// Maximum absolute subdeterminant over all orders `1..=rank`, and the rank.
/// A rank-zero matrix reports `delta = 1` (the empty minor).
pub fn max_abs_subdeterminant(e: &IntMatrix) -> Result<(BigInt, usize)> {
    if e.rows() * e.cols() > SUBDETERMINANT_GUARD {
        return Err(Error::SizeGuardExceeded(format!(
            "subdeterminant enumeration limited to rows*cols <= {SUBDETERMINANT_GUARD}, got {}x{}",
            e.rows(),
            e.cols()
        )));
    }
    let mut delta: Option<BigInt> = None;
    let mut rank = 0;
    for k in 1..=e.rows().min(e.cols()) {
        let mut nonzero_minor = false;
        for rs in (0..e.rows()).combinations(k) {
            for cs in (0..e.cols()).combinations(k) {
                let minor: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| e.get(r, c).clone()).collect())
                    .collect();
                let d = bareiss_determinant(minor).abs();
                if !d.is_zero() {
                    nonzero_minor = true;
                    if delta.as_ref().is_none_or(|best| d > *best) {
                        delta = Some(d);
                    }
                }
            }
        }
        // every minor of order above the rank vanishes
        if !nonzero_minor {
            break;
        }
        rank = k;
    }
    Ok((delta.unwrap_or_else(BigInt::one), rank))
}

/// Cached Hermite decomposition of a matrix, reused for repeated solves with
/// different right-hand sides.
#[derive(Clone, Debug)]
pub struct HermiteSystem {
    h: IntMatrix,
    u: IntMatrix,
    /// `(row, column)` of each pivot, in increasing order.
    pivots: Vec<(usize, usize)>,
}

impl HermiteSystem {
    pub fn new(m: &IntMatrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut h = m.clone();
        let mut u = IntMatrix::identity(cols);
        let mut pivots = Vec::new();
        let mut k = 0;
        for i in 0..rows {
            if k == cols {
                break;
            }
            for j in k + 1..cols {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let a = h.get(i, k).clone();
                let b = h.get(i, j).clone();
                let (g, s, t) = extended_gcd(&a, &b);
                let (ag, bg) = (&a / &g, &b / &g);
                // [col_k col_j] <- [col_k col_j] * [[s, -b/g], [t, a/g]], determinant 1
                combine_columns(&mut h, k, j, &s, &t, &(-&bg), &ag);
                combine_columns(&mut u, k, j, &s, &t, &(-&bg), &ag);
            }
            if h.get(i, k).is_zero() {
                continue;
            }
            if h.get(i, k).is_negative() {
                negate_column(&mut h, k);
                negate_column(&mut u, k);
            }
            let pivot = h.get(i, k).clone();
            for j in 0..k {
                let q = h.get(i, j).div_floor(&pivot);
                if !q.is_zero() {
                    let one = BigInt::one();
                    let zero = BigInt::zero();
                    // col_j <- col_j - q * col_k
                    combine_columns(&mut h, j, k, &one, &(-&q), &zero, &one);
                    combine_columns(&mut u, j, k, &one, &(-&q), &zero, &one);
                }
            }
            pivots.push((i, k));
            k += 1;
        }
        HermiteSystem { h, u, pivots }
    }

    pub fn h(&self) -> &IntMatrix {
        &self.h
    }

    pub fn u(&self) -> &IntMatrix {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &[BigInt]) -> Result<Option<IntVector>> {
        if b.len() != self.h.rows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, right-hand side has {} entries",
                self.h.rows(),
                b.len()
            )));
        }
        let cols = self.h.cols();
        let mut y = vec![BigInt::zero(); cols];
        let mut next_pivot = 0;
        for (i, bi) in b.iter().enumerate() {
            let filled = next_pivot;
            let partial: BigInt = (0..filled).map(|j| self.h.get(i, j) * &y[j]).sum();
            match self.pivots.get(next_pivot) {
                Some(&(pr, pc)) if pr == i => {
                    let (q, r) = (bi - partial).div_rem(self.h.get(i, pc));
                    if !r.is_zero() {
                        return Ok(None);
                    }
                    y[pc] = q;
                    next_pivot += 1;
                }
                _ => {
                    if partial != *bi {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(self.u.mul_vec(&y)?))
    }

    pub fn kernel_basis(&self) -> Vec<IntVector> {
        (self.rank()..self.u.cols())
            .map(|c| {
                let mut v = self.u.column(c);
                if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                v
            })
            .collect()
    }
}

/// `(col_a, col_b) <- (p*col_a + q*col_b, r*col_a + s*col_b)`.
fn combine_columns(m: &mut IntMatrix, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
    for row in 0..m.rows() {
        let x = m.get(row, a).clone();
        let y = m.get(row, b).clone();
        m.set(row, a, p * &x + q * &y);
        m.set(row, b, r * &x + s * &y);
    }
}

fn negate_column(m: &mut IntMatrix, c: usize) {
    for row in 0..m.rows() {
        let v = -m.get(row, c);
        m.set(row, c, v);
    }
}
