//! Norm bounds on Graver basis elements.
//!
//! Every bound here is an upper bound on `max { |v|_1 : v in G(E) }` for a
//! matrix family. Real-valued powers are rounded up, so the integer values
//! returned never undershoot the real formula.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::graver::{graver_completion, l1_norm, GraverBasis, COMPLETION_MAX_COLUMNS};
use crate::linalg::{max_abs_subdeterminant, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub bound_name: String,
    pub value: BigInt,
    pub inputs: BTreeMap<String, BigInt>,
}

impl BoundReport {
    fn new(name: &str, value: BigInt, inputs: &[(&str, BigInt)]) -> Self {
        BoundReport {
            bound_name: name.to_string(),
            value,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

fn big(n: usize) -> BigInt {
    BigInt::from(n)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg.to_string()))
    }
}

/// `ceil(sqrt(n))` for `n >= 0`.
fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

/// `ceil((sqrt(k) * x)^p)` for nonnegative `k`, `x`.
pub fn ceil_sqrt_power(k: &BigInt, x: &BigInt, p: u32) -> BigInt {
    let xp = x.pow(p);
    if p.is_multiple_of(2) {
        k.pow(p / 2) * xp
    } else {
        let coeff = k.pow((p - 1) / 2) * xp;
        ceil_sqrt(&(&coeff * &coeff * k))
    }
}

/// Degree bound for primitive partition identities: `2M - 1` for one-row
/// matrices with entries bounded by `M`.
pub fn ppi_bound(max_entry: &BigInt) -> Result<BigInt> {
    require(max_entry >= &BigInt::one(), "PPI bound needs M >= 1")?;
    Ok(max_entry * 2 - 1)
}

/// `max(2, 2M - 1)`: the PPI bound with the repeated-column case `M = 1`
/// (matrix `(1 1)` has the element `(1, -1)`) covered.
pub fn relaxed_ppi_bound(max_entry: &BigInt) -> Result<BigInt> {
    Ok(ppi_bound(max_entry)?.max(BigInt::from(2)))
}

/// `ceil((sqrt(m) * M)^m)`, the Hadamard-type bound on subdeterminants.
/// `M` is clamped to at least 1 so that the empty minor of a zero matrix is
/// covered.
pub fn hadamard_bound(rows: usize, max_entry: &BigInt) -> BigInt {
    let m = max_entry.clone().max(BigInt::one());
    ceil_sqrt_power(&big(rows), &m, rows as u32)
}

/// Determinant-based bounds for `E`: the exact-Δ variant `(n-r)(r+1)Δ`
/// (when `exact` is set), the Hadamard variant `(n-r)(r+1)(√m M)^m`, and the
/// aggregated variant `(d-r)(r+1)(√m M)^m` with `d` distinct columns.
pub fn determinant_bounds(e: &IntMatrix, exact: bool) -> Result<Vec<BoundReport>> {
    let (n, m) = (e.cols(), e.rows());
    let max_entry = e.max_abs_entry();
    let mut out = Vec::new();
    let rank = if exact {
        let (delta, rank) = max_abs_subdeterminant(e)?;
        let value = big(n - rank) * big(rank + 1) * &delta;
        out.push(BoundReport::new(
            "determinant_exact",
            value,
            &[("n", big(n)), ("m", big(m)), ("r", big(rank)), ("delta", delta)],
        ));
        rank
    } else {
        e.rank()
    };
    let hadamard = hadamard_bound(m, &max_entry);
    out.push(BoundReport::new(
        "determinant_hadamard",
        big(n - rank) * big(rank + 1) * &hadamard,
        &[("n", big(n)), ("m", big(m)), ("r", big(rank)), ("M", max_entry.clone())],
    ));
    let d = e.distinct_column_count();
    out.push(BoundReport::new(
        "determinant_aggregated",
        big(d.saturating_sub(rank)) * big(rank + 1) * &hadamard,
        &[("d", big(d)), ("m", big(m)), ("r", big(rank)), ("M", max_entry)],
    ));
    Ok(out)
}

/// `(2nM)^(2^m - 1) * L^(2^m)`: bound for `E = (F over L)` where `F` has `m`
/// rows with entries bounded by `M` and `L = max |v|_1 over G(L)`.
pub fn stacked_bound(lower_max_l1: &BigInt, n: usize, max_entry: &BigInt, m: u32) -> Result<BigInt> {
    require(!lower_max_l1.is_negative(), "stacked bound needs a nonnegative 1-norm")?;
    if m == 0 {
        return Ok(lower_max_l1.clone());
    }
    require(n >= 1, "stacked bound needs n >= 1")?;
    require(max_entry >= &BigInt::one(), "stacked bound needs M >= 1")?;
    require(m < 32, "stacked bound exponent too large")?;
    let e = 1u64 << m;
    let base = big(2 * n) * max_entry;
    Ok(Pow::pow(&base, e - 1) * Pow::pow(lower_max_l1, e))
}

/// The intermediate bound `max |λ|_1 over G(F·G(L))` times `max |v|_1 over
/// G(L)`. Repeated columns of `F·G(L)` are aggregated, which changes the
/// first factor only through the `max(2, ·)` of the aggregation identity.
pub fn stacked_intermediate_bound(f: &IntMatrix, lower: &GraverBasis) -> Result<BigInt> {
    if lower.is_empty() {
        return Ok(BigInt::zero());
    }
    let mut columns: Vec<Vec<BigInt>> = Vec::new();
    for g in lower.elements() {
        columns.push(f.mul_vec(g)?);
    }
    let total = columns.len();
    columns.sort();
    columns.dedup();
    if columns.len() > COMPLETION_MAX_COLUMNS {
        return Err(Error::SizeGuardExceeded(format!(
            "F*G(L) has {} distinct columns",
            columns.len()
        )));
    }
    let product = IntMatrix::from_rows(columns.clone(), f.rows())?.transpose();
    let inner = graver_completion(&product)?;
    let mut lambda = inner.max_l1().clone();
    if columns.len() < total {
        lambda = lambda.max(BigInt::from(2));
    }
    Ok(lambda * lower.max_l1())
}

/// Constants measured from the Graver basis of the stochastic part at one
/// fixed `N`: `g` = largest entry, `xi` = number of distinct first-stage
/// parts, `eta` = largest number of distinct second-stage blocks that occur
/// together with one first-stage part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticConstants {
    pub g: BigInt,
    pub xi: BigInt,
    pub eta: BigInt,
}

pub fn measure_stochastic_constants(
    basis: &GraverBasis,
    n_b: usize,
    n_a: usize,
    n_blocks: usize,
) -> Result<StochasticConstants> {
    if basis.matrix().cols() != n_b + n_blocks * n_a {
        return Err(Error::DimensionMismatch(
            "stochastic basis does not match block sizes".into(),
        ));
    }
    let mut blocks_by_x: BTreeMap<Vec<BigInt>, std::collections::BTreeSet<Vec<BigInt>>> = BTreeMap::new();
    for v in basis.elements() {
        let entry = blocks_by_x.entry(v[..n_b].to_vec()).or_default();
        for i in 0..n_blocks {
            entry.insert(v[n_b + i * n_a..n_b + (i + 1) * n_a].to_vec());
        }
    }
    let eta = blocks_by_x.values().map(|s| s.len()).max().unwrap_or(0);
    Ok(StochasticConstants {
        g: basis.max_linf().clone(),
        xi: big(blocks_by_x.len()),
        eta: big(eta),
    })
}

/// `(2(n_B + N n_A) M)^(2^{d_C} - 1) * ((n_B + N n_A) g)^(2^{d_C})`.
pub fn fourblock_bound_primary(
    n_a: usize,
    n_b: usize,
    d_c: u32,
    max_entry: &BigInt,
    g: &BigInt,
    n_blocks: usize,
) -> Result<BigInt> {
    require(n_a >= 1 && n_blocks >= 1, "4-block bound needs n_A >= 1 and N >= 1")?;
    require(
        max_entry >= &BigInt::one() && g >= &BigInt::one(),
        "4-block bound needs M >= 1 and g >= 1",
    )?;
    let n = n_b + n_blocks * n_a;
    stacked_bound(&(big(n) * g), n, max_entry, d_c)
}

/// `xi (N + eta)^eta d_C (sqrt(d_C) (n_B + N n_A) M)^{d_C} (n_B + N n_A) g`,
/// with the real power rounded up. Vanishes for `d_C = 0`; use
/// [`fourblock_bound_primary`] in that case.
#[allow(clippy::too_many_arguments)]
pub fn fourblock_bound_alternative(
    n_a: usize,
    n_b: usize,
    d_c: u32,
    max_entry: &BigInt,
    g: &BigInt,
    xi: &BigInt,
    eta: &BigInt,
    n_blocks: usize,
) -> Result<BigInt> {
    require(n_a >= 1 && n_blocks >= 1, "4-block bound needs n_A >= 1 and N >= 1")?;
    require(
        max_entry >= &BigInt::one() && g >= &BigInt::one() && xi >= &BigInt::one() && eta >= &BigInt::one(),
        "4-block bound needs M, g, xi, eta >= 1",
    )?;
    let n = big(n_b + n_blocks * n_a);
    let eta_exp: u32 = eta
        .try_into()
        .map_err(|_| Error::InvalidInput("eta too large".into()))?;
    let compositions = Pow::pow(&(big(n_blocks) + eta), eta_exp);
    let power = ceil_sqrt_power(&BigInt::from(d_c), &(&n * max_entry), d_c);
    Ok(xi * compositions * BigInt::from(d_c) * power * n * g)
}

/// Block data needed to evaluate the 4-block bounds.
#[derive(Clone, Debug)]
pub struct FourBlockShape {
    pub n_a: usize,
    pub n_b: usize,
    pub d_c: usize,
    pub n_blocks: usize,
    /// Largest absolute entry of `C` and `D`.
    pub max_entry: BigInt,
}

/// Both 4-block bounds with constants measured from `stochastic`, plus
/// their minimum (`fourblock_min`). Constants and `M` are clamped to at least
/// 1, which only loosens the bounds.
pub fn fourblock_bounds(shape: &FourBlockShape, stochastic: &GraverBasis) -> Result<Vec<BoundReport>> {
    let consts = measure_stochastic_constants(stochastic, shape.n_b, shape.n_a, shape.n_blocks)?;
    let one = BigInt::one();
    let m = shape.max_entry.clone().max(one.clone());
    let g = consts.g.clone().max(one.clone());
    let xi = consts.xi.clone().max(one.clone());
    let eta = consts.eta.clone().max(one);
    let d_c = u32::try_from(shape.d_c).map_err(|_| Error::InvalidInput("d_C too large".into()))?;
    let inputs = [
        ("n_A", big(shape.n_a)),
        ("n_B", big(shape.n_b)),
        ("d_C", big(shape.d_c)),
        ("N", big(shape.n_blocks)),
        ("M", m.clone()),
        ("g", g.clone()),
        ("xi", xi.clone()),
        ("eta", eta.clone()),
        ("stochastic_max_l1", stochastic.max_l1().clone()),
    ];
    let primary = fourblock_bound_primary(shape.n_a, shape.n_b, d_c, &m, &g, shape.n_blocks)?;
    let mut out = vec![BoundReport::new("fourblock_primary", primary.clone(), &inputs)];
    let mut best = primary;
    if d_c > 0 {
        let alt = fourblock_bound_alternative(shape.n_a, shape.n_b, d_c, &m, &g, &xi, &eta, shape.n_blocks)?;
        best = best.min(alt.clone());
        out.push(BoundReport::new("fourblock_alternative", alt, &inputs));
    }
    out.push(BoundReport::new("fourblock_min", best, &inputs));
    Ok(out)
}

/// Largest 1-norm over a set of vectors; zero for an empty set.
pub fn max_l1_of(vectors: &[Vec<BigInt>]) -> BigInt {
    vectors.iter().map(|v| l1_norm(v)).max().unwrap_or_else(BigInt::zero)
}
