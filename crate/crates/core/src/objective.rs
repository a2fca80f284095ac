//! Separable convex objectives with exact rational evaluation.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int_rat, Rational};

/// One convex univariate term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// `slope * x`
    Linear { slope: Rational },
    /// `weight * |x - center|`
    AbsDev { weight: Rational, center: BigInt },
    /// `coeff * (x - center)^2`
    Quadratic { coeff: Rational, center: Rational },
    /// Convex piecewise-linear function with `slopes.len() == breakpoints.len() + 1`.
    /// Its value at the leftmost breakpoint is `anchor`.
    PiecewiseLinear {
        breakpoints: Vec<Rational>,
        slopes: Vec<Rational>,
        anchor: Rational,
    },
}

fn strictly_increasing(v: &[Rational]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl Term {
    pub fn validate(&self) -> Result<()> {
        match self {
            Term::Linear { .. } => Ok(()),
            Term::AbsDev { weight, .. } if weight.is_negative() => {
                Err(Error::InvalidInput("absdev weight must be nonnegative".into()))
            }
            Term::Quadratic { coeff, .. } if coeff.is_negative() => {
                Err(Error::InvalidInput("quadratic coefficient must be nonnegative".into()))
            }
            Term::PiecewiseLinear {
                breakpoints, slopes, ..
            } => {
                if breakpoints.is_empty() || slopes.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidInput(
                        "pl term needs k >= 1 breakpoints and k + 1 slopes".into(),
                    ));
                }
                if !strictly_increasing(breakpoints) || !strictly_increasing(slopes) {
                    return Err(Error::InvalidInput(
                        "pl breakpoints and slopes must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self {
            Term::Linear { slope } => slope * x,
            Term::AbsDev { weight, center } => weight * (x - int_rat(center)).abs(),
            Term::Quadratic { coeff, center } => {
                let d = x - center;
                coeff * &d * &d
            }
            Term::PiecewiseLinear {
                breakpoints,
                slopes,
                anchor,
            } => {
                if x <= &breakpoints[0] {
                    return anchor + &slopes[0] * (x - &breakpoints[0]);
                }
                let mut value = anchor.clone();
                for (k, left) in breakpoints.iter().enumerate() {
                    let slope = &slopes[k + 1];
                    match breakpoints.get(k + 1) {
                        Some(right) if x > right => value += slope * (right - left),
                        _ => return value + slope * (x - left),
                    }
                }
                unreachable!("the last piece is unbounded")
            }
        }
    }

    /// Derivative at a point that is not a kink.
    fn derivative(&self, x: &Rational) -> Rational {
        match self {
            Term::Linear { slope } => slope.clone(),
            Term::AbsDev { weight, center } => {
                if x > &int_rat(center) {
                    weight.clone()
                } else {
                    -weight.clone()
                }
            }
            Term::Quadratic { coeff, center } => coeff * (x - center) * Rational::from_integer(2.into()),
            Term::PiecewiseLinear {
                breakpoints, slopes, ..
            } => {
                let k = breakpoints.iter().take_while(|b| *b < x).count();
                slopes[k].clone()
            }
        }
    }

    fn kinks(&self) -> Vec<Rational> {
        match self {
            Term::AbsDev { center, .. } => vec![int_rat(center)],
            Term::PiecewiseLinear { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    fn quadratic_coeff(&self) -> Rational {
        match self {
            Term::Quadratic { coeff, .. } => coeff.clone(),
            _ => Rational::zero(),
        }
    }
}

/// `f(z) = sum_i f_i(z_i)` with each `f_i` a sum of convex terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparableObjective {
    terms: Vec<Vec<Term>>,
}

/// Piecewise-linear interpolation of one coordinate function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlCoordinate {
    pub breakpoints: Vec<Rational>,
    pub values: Vec<Rational>,
    pub slopes: Vec<Rational>,
}

impl SeparableObjective {
    pub fn new(terms: Vec<Vec<Term>>) -> Result<Self> {
        for t in terms.iter().flatten() {
            t.validate()?;
        }
        Ok(SeparableObjective { terms })
    }

    pub fn zero(dim: usize) -> Self {
        SeparableObjective {
            terms: vec![Vec::new(); dim],
        }
    }

    /// `sum_i coeff * z_i^2`.
    pub fn sum_of_squares(dim: usize) -> Self {
        let t = Term::Quadratic {
            coeff: Rational::one(),
            center: Rational::zero(),
        };
        SeparableObjective {
            terms: vec![vec![t]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Vec<Term>] {
        &self.terms
    }

    /// The objective on the given coordinates only, in that order.
    pub fn restrict(&self, coords: &[usize]) -> Self {
        SeparableObjective {
            terms: coords.iter().map(|&i| self.terms[i].clone()).collect(),
        }
    }

    pub fn coordinate_value(&self, i: usize, x: &Rational) -> Rational {
        self.terms[i].iter().map(|t| t.eval(x)).sum()
    }

    pub fn coordinate_value_int(&self, i: usize, x: &BigInt) -> Rational {
        self.coordinate_value(i, &int_rat(x))
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coordinates, point has {n}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, z: &[Rational]) -> Result<Rational> {
        self.check_dim(z.len())?;
        Ok(z.iter().enumerate().map(|(i, x)| self.coordinate_value(i, x)).sum())
    }

    pub fn evaluate_int(&self, z: &[BigInt]) -> Result<Rational> {
        self.check_dim(z.len())?;
        Ok(z.iter().enumerate().map(|(i, x)| self.coordinate_value_int(i, x)).sum())
    }

    pub fn compare(&self, z: &[Rational], w: &[Rational]) -> Result<Ordering> {
        Ok(self.evaluate(z)?.cmp(&self.evaluate(w)?))
    }

    pub fn compare_int(&self, z: &[BigInt], w: &[BigInt]) -> Result<Ordering> {
        Ok(self.evaluate_int(z)?.cmp(&self.evaluate_int(w)?))
    }

    /// Exact minimum of `f_i` over `[lo, hi]`.
    pub fn coordinate_min(&self, i: usize, lo: &Rational, hi: &Rational) -> Rational {
        let terms = &self.terms[i];
        let mut points: Vec<Rational> = terms
            .iter()
            .flat_map(|t| t.kinks())
            .filter(|k| k > lo && k < hi)
            .collect();
        points.push(lo.clone());
        points.push(hi.clone());
        points.sort();
        points.dedup();
        let a: Rational = terms.iter().map(Term::quadratic_coeff).sum();
        let mut candidates = points.clone();
        if a.is_positive() {
            let two = Rational::from_integer(2.into());
            for w in points.windows(2) {
                let mid = (&w[0] + &w[1]) / &two;
                let slope: Rational = terms.iter().map(|t| t.derivative(&mid)).sum();
                let x = &mid - slope / (&two * &a);
                candidates.push(x.clamp(w[0].clone(), w[1].clone()));
            }
        }
        candidates
            .iter()
            .map(|x| self.coordinate_value(i, x))
            .min()
            .expect("at least the two endpoints")
    }

    /// Upper bound on `max |f|` over the box `[l, u]`.
    pub fn fhat_bound(&self, l: &[BigInt], u: &[BigInt]) -> Result<Rational> {
        self.check_dim(l.len())?;
        self.check_dim(u.len())?;
        let mut total = Rational::zero();
        for i in 0..self.dim() {
            let (lo, hi) = (int_rat(&l[i]), int_rat(&u[i]));
            if lo > hi {
                return Err(Error::InvalidInput(format!("empty box at coordinate {i}")));
            }
            let at_lo = self.coordinate_value(i, &lo).abs();
            let at_hi = self.coordinate_value(i, &hi).abs();
            let at_min = self.coordinate_min(i, &lo, &hi).abs();
            total += at_lo.max(at_hi).max(at_min);
        }
        Ok(total)
    }

    /// Interpolates each `f_i` at `l_i, l_i + step, ...`, ending exactly at
    /// `u_i`.
    pub fn piecewise_linearize(&self, l: &[Rational], u: &[Rational], step: &Rational) -> Result<Vec<PlCoordinate>> {
        self.check_dim(l.len())?;
        self.check_dim(u.len())?;
        if !step.is_positive() {
            return Err(Error::InvalidInput("grid step must be positive".into()));
        }
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            if l[i] > u[i] {
                return Err(Error::InvalidInput(format!("empty box at coordinate {i}")));
            }
            let mut breakpoints = vec![l[i].clone()];
            loop {
                let next = breakpoints.last().unwrap() + step;
                if next >= u[i] {
                    if breakpoints.last().unwrap() < &u[i] {
                        breakpoints.push(u[i].clone());
                    }
                    break;
                }
                breakpoints.push(next);
            }
            let values: Vec<Rational> = breakpoints.iter().map(|x| self.coordinate_value(i, x)).collect();
            let slopes = breakpoints
                .windows(2)
                .zip(values.windows(2))
                .map(|(x, v)| (&v[1] - &v[0]) / (&x[1] - &x[0]))
                .collect();
            out.push(PlCoordinate {
                breakpoints,
                values,
                slopes,
            });
        }
        Ok(out)
    }
}

impl PlCoordinate {
    /// Value of the interpolant; `x` must lie within the breakpoint range.
    pub fn eval(&self, x: &Rational) -> Rational {
        let k = self.breakpoints.iter().skip(1).take_while(|b| *b < x).count();
        if k >= self.slopes.len() {
            return self.values[k].clone();
        }
        &self.values[k] + &self.slopes[k] * (x - &self.breakpoints[k])
    }
}

/// `h(v) = c^T v^+ + d^T v^-`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedObjective {
    pub c: Vec<Rational>,
    pub d: Vec<Rational>,
}

impl DirectedObjective {
    pub fn new(c: Vec<Rational>, d: Vec<Rational>) -> Result<Self> {
        if c.len() != d.len() {
            return Err(Error::DimensionMismatch("c and d differ in length".into()));
        }
        Ok(DirectedObjective { c, d })
    }

    /// `h(v) = -v_i` (or `+v_i` when `maximize` is false).
    pub fn coordinate(dim: usize, i: usize, maximize: bool) -> Self {
        let mut c = vec![Rational::zero(); dim];
        let mut d = vec![Rational::zero(); dim];
        let one = Rational::one();
        if maximize {
            c[i] = -one.clone();
            d[i] = one;
        } else {
            c[i] = one.clone();
            d[i] = -one;
        }
        DirectedObjective { c, d }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn coordinate_value(&self, i: usize, v: &BigInt) -> Rational {
        if v.is_positive() {
            &self.c[i] * int_rat(v)
        } else {
            &self.d[i] * int_rat(&-v)
        }
    }
}

pub fn directed_value(h: &DirectedObjective, v: &[BigInt]) -> Result<Rational> {
    if v.len() != h.dim() {
        return Err(Error::DimensionMismatch("directed objective and vector differ".into()));
    }
    Ok(v.iter().enumerate().map(|(i, x)| h.coordinate_value(i, x)).sum())
}

/// A cost that the augmentation routines can minimize: the change caused by
/// moving coordinate `i` from `z_i` by `v_i` depends only on `(i, z_i, v_i)`.
pub trait StepCost {
    fn dim(&self) -> usize;
    fn coordinate_delta(&self, i: usize, zi: &BigInt, vi: &BigInt) -> Rational;

    fn delta(&self, z: &[BigInt], v: &[BigInt]) -> Rational {
        (0..self.dim())
            .filter(|&i| !v[i].is_zero())
            .map(|i| self.coordinate_delta(i, &z[i], &v[i]))
            .sum()
    }
}

impl StepCost for SeparableObjective {
    fn dim(&self) -> usize {
        self.terms.len()
    }

    fn coordinate_delta(&self, i: usize, zi: &BigInt, vi: &BigInt) -> Rational {
        self.coordinate_value_int(i, &(zi + vi)) - self.coordinate_value_int(i, zi)
    }
}

impl StepCost for DirectedObjective {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn coordinate_delta(&self, i: usize, _zi: &BigInt, vi: &BigInt) -> Rational {
        self.coordinate_value(i, vi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;
    use crate::rational::rat;

    fn r(n: i64) -> Rational {
        rat(n, 1)
    }

    fn rv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| r(x)).collect()
    }

    fn abs_dev(weight: i64, center: i64) -> SeparableObjective {
        SeparableObjective::new(vec![vec![Term::AbsDev {
            weight: r(weight),
            center: center.into(),
        }]])
        .unwrap()
    }

    fn pl_example() -> Term {
        Term::PiecewiseLinear {
            breakpoints: vec![r(0)],
            slopes: vec![r(-1), r(2)],
            anchor: r(0),
        }
    }

    #[test]
    fn evaluate_examples() {
        let f = SeparableObjective::sum_of_squares(3);
        assert_eq!(f.evaluate(&rv(&[1, 1, 1])).unwrap(), r(3));
        assert_eq!(abs_dev(3, 2).evaluate(&rv(&[5])).unwrap(), r(9));
        let pl = pl_example();
        assert_eq!(pl.eval(&r(2)), r(4));
        assert_eq!(pl.eval(&r(-1)), r(1));
        assert!(f.evaluate(&rv(&[1])).is_err());
    }

    #[test]
    fn pl_with_several_pieces() {
        let t = Term::PiecewiseLinear {
            breakpoints: vec![r(0), r(2)],
            slopes: vec![r(-1), r(1), r(3)],
            anchor: r(5),
        };
        assert_eq!(t.eval(&r(-2)), r(7));
        assert_eq!(t.eval(&r(1)), r(6));
        assert_eq!(t.eval(&r(2)), r(7));
        assert_eq!(t.eval(&r(4)), r(13));
    }

    #[test]
    fn validation() {
        assert!(SeparableObjective::new(vec![vec![Term::Quadratic {
            coeff: r(-1),
            center: r(0)
        }]])
        .is_err());
        assert!(SeparableObjective::new(vec![vec![Term::AbsDev {
            weight: r(-1),
            center: 0.into()
        }]])
        .is_err());
        let bad = Term::PiecewiseLinear {
            breakpoints: vec![r(0)],
            slopes: vec![r(2), r(1)],
            anchor: r(0),
        };
        assert!(bad.validate().is_err());
        let short = Term::PiecewiseLinear {
            breakpoints: vec![r(0)],
            slopes: vec![r(1)],
            anchor: r(0),
        };
        assert!(short.validate().is_err());
    }

    #[test]
    fn compare_examples() {
        let f = SeparableObjective::sum_of_squares(2);
        assert_eq!(f.compare(&rv(&[1, 2]), &rv(&[1, 2])).unwrap(), Ordering::Equal);
        assert_eq!(f.compare(&rv(&[0, 0]), &rv(&[1, 0])).unwrap(), Ordering::Less);
        assert_eq!(abs_dev(1, 1).compare(&rv(&[3]), &rv(&[-1])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn fhat_examples() {
        let f = SeparableObjective::sum_of_squares(2);
        assert_eq!(f.fhat_bound(&int_vec(&[-2, -2]), &int_vec(&[2, 2])).unwrap(), r(8));
        assert_eq!(
            SeparableObjective::zero(2)
                .fhat_bound(&int_vec(&[0, 0]), &int_vec(&[3, 3]))
                .unwrap(),
            r(0)
        );
        assert_eq!(abs_dev(1, 5).fhat_bound(&int_vec(&[0]), &int_vec(&[3])).unwrap(), r(5));
    }

    #[test]
    fn coordinate_min_is_exact() {
        // (x - 1/3)^2 + 2x has its minimum at x = -2/3 with value -1/3
        let f = SeparableObjective::new(vec![vec![
            Term::Quadratic {
                coeff: r(1),
                center: rat(1, 3),
            },
            Term::Linear { slope: r(2) },
        ]])
        .unwrap();
        assert_eq!(f.coordinate_min(0, &r(-3), &r(3)), rat(-1, 3));
        assert_eq!(f.coordinate_min(0, &r(0), &r(3)), rat(1, 9));
        // pl with minimum at the kink
        let g = SeparableObjective::new(vec![vec![
            pl_example(),
            Term::Quadratic {
                coeff: rat(1, 100),
                center: r(0),
            },
        ]])
        .unwrap();
        assert_eq!(g.coordinate_min(0, &r(-3), &r(3)), r(0));
        // negative minimum dominates the endpoint values
        let h = SeparableObjective::new(vec![vec![
            Term::Quadratic {
                coeff: r(1),
                center: r(0),
            },
            Term::Linear { slope: r(-2) },
        ]])
        .unwrap();
        assert_eq!(h.fhat_bound(&int_vec(&[0]), &int_vec(&[2])).unwrap(), r(1));
    }

    #[test]
    fn linearize_examples() {
        let sq = SeparableObjective::sum_of_squares(1);
        let pl = sq.piecewise_linearize(&rv(&[0]), &rv(&[2]), &r(1)).unwrap();
        assert_eq!(pl[0].breakpoints, rv(&[0, 1, 2]));
        assert_eq!(pl[0].values, rv(&[0, 1, 4]));
        assert_eq!(pl[0].slopes, rv(&[1, 3]));
        let lin = SeparableObjective::new(vec![vec![Term::Linear { slope: rat(3, 2) }]]).unwrap();
        let pl = lin.piecewise_linearize(&rv(&[-1]), &rv(&[2]), &rat(2, 3)).unwrap();
        assert!(pl[0].slopes.iter().all(|s| *s == rat(3, 2)));
        assert_eq!(pl[0].breakpoints.last().unwrap(), &r(2));
        let ab = abs_dev(1, 0).piecewise_linearize(&rv(&[-1]), &rv(&[1]), &r(1)).unwrap();
        assert_eq!(ab[0].values, rv(&[1, 0, 1]));
        assert_eq!(ab[0].slopes, rv(&[-1, 1]));
        assert_eq!(pl[0].values.len(), pl[0].breakpoints.len());
        assert!(sq.piecewise_linearize(&rv(&[0]), &rv(&[1]), &r(0)).is_err());
    }

    #[test]
    fn pl_interpolant_overestimates() {
        let sq = SeparableObjective::sum_of_squares(1);
        let pl = sq.piecewise_linearize(&rv(&[-2]), &rv(&[2]), &rat(1, 2)).unwrap();
        for k in -8..=8 {
            let x = rat(k, 4);
            assert!(pl[0].eval(&x) >= sq.coordinate_value(0, &x));
        }
        assert_eq!(pl[0].eval(&r(1)), r(1));
    }

    #[test]
    fn directed_examples() {
        let h = DirectedObjective::new(rv(&[1, 1]), rv(&[2, 2])).unwrap();
        assert_eq!(directed_value(&h, &int_vec(&[0, 0])).unwrap(), r(0));
        assert_eq!(directed_value(&h, &int_vec(&[3, -1])).unwrap(), r(5));
        let sym = DirectedObjective::new(rv(&[1, 1]), rv(&[1, 1])).unwrap();
        assert_eq!(directed_value(&sym, &int_vec(&[1, -1])).unwrap(), r(2));
        let mixed = DirectedObjective::new(rv(&[1, 1]), rv(&[-2, 0])).unwrap();
        assert_eq!(directed_value(&mixed, &int_vec(&[-1, 1])).unwrap(), r(-1));
        assert!(directed_value(&h, &int_vec(&[1])).is_err());
        let up = DirectedObjective::coordinate(2, 1, true);
        assert_eq!(directed_value(&up, &int_vec(&[5, 3])).unwrap(), r(-3));
    }

    #[test]
    fn step_cost_matches_evaluation() {
        let f = SeparableObjective::sum_of_squares(3);
        let z = int_vec(&[1, -2, 0]);
        let v = int_vec(&[0, 3, -1]);
        let moved: Vec<BigInt> = z.iter().zip(&v).map(|(a, b)| a + b).collect();
        assert_eq!(
            f.delta(&z, &v),
            f.evaluate_int(&moved).unwrap() - f.evaluate_int(&z).unwrap()
        );
    }
}
