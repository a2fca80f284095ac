#![allow(dead_code)]

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use graver_prox::fourblock::FourBlockInstance;
use graver_prox::linalg::{IntMatrix, IntVector};
use graver_prox::objective::{SeparableObjective, Term};
use graver_prox::rational::{rat, Rational};

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_abs: i64) -> IntMatrix {
    let data = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| BigInt::from(rng.gen_range(-max_abs..=max_abs)))
                .collect()
        })
        .collect();
    IntMatrix::from_rows(data, cols).unwrap()
}

/// Random matrix with at least one entry of absolute value `max_abs`.
pub fn random_matrix_with_max<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_abs: i64) -> IntMatrix {
    let mut m = random_matrix(rng, rows, cols, max_abs);
    let (r, c) = (rng.gen_range(0..rows), rng.gen_range(0..cols));
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    m.set(r, c, BigInt::from(sign * max_abs));
    m
}

pub fn lattice_size(l: &[BigInt], u: &[BigInt]) -> u128 {
    l.iter()
        .zip(u)
        .map(|(l, u)| u128::try_from(u - l + 1).unwrap())
        .product()
}

pub fn random_term<R: Rng>(rng: &mut R) -> Vec<Term> {
    let quadratic = |rng: &mut R| Term::Quadratic {
        coeff: [rat(1, 2), rat(1, 1), rat(2, 1)].choose(rng).unwrap().clone(),
        center: rat(rng.gen_range(-12..=12), rng.gen_range(1..=3)),
    };
    let absdev = |rng: &mut R| Term::AbsDev {
        weight: rat(rng.gen_range(1..=3), 1),
        center: BigInt::from(rng.gen_range(-4..=4)),
    };
    match rng.gen_range(0..4) {
        0 => vec![quadratic(rng)],
        1 => vec![absdev(rng)],
        2 => vec![quadratic(rng), absdev(rng)],
        _ => vec![
            Term::Linear {
                slope: rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)),
            },
            quadratic(rng),
        ],
    }
}

pub fn random_objective<R: Rng>(rng: &mut R, dim: usize) -> SeparableObjective {
    SeparableObjective::new((0..dim).map(|_| random_term(rng)).collect()).unwrap()
}

/// Random box inside `[-4, 4]^dim` with at most `max_points` lattice points.
pub fn random_box<R: Rng>(rng: &mut R, dim: usize, max_points: u128) -> (IntVector, IntVector) {
    let mut l: Vec<i64> = (0..dim).map(|_| rng.gen_range(-4..=0)).collect();
    let mut u: Vec<i64> = l.iter().map(|&lo| rng.gen_range(lo + 1..=(lo + 6).min(4))).collect();
    loop {
        let size: u128 = l.iter().zip(&u).map(|(a, b)| (b - a + 1) as u128).product();
        if size <= max_points {
            break;
        }
        let widest = (0..dim).max_by_key(|&i| u[i] - l[i]).unwrap();
        if rng.gen_bool(0.5) {
            l[widest] += 1;
        } else {
            u[widest] -= 1;
        }
    }
    (
        l.into_iter().map(BigInt::from).collect(),
        u.into_iter().map(BigInt::from).collect(),
    )
}

pub struct Shape {
    pub n: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub d_c: usize,
}

pub fn random_shape<R: Rng>(rng: &mut R) -> Shape {
    loop {
        let s = Shape {
            n: rng.gen_range(1..=3),
            n_a: rng.gen_range(1..=2),
            n_b: rng.gen_range(0..=2),
            d_c: rng.gen_range(0..=1),
        };
        let dim = s.n_b + s.n * s.n_a;
        if (2..=8).contains(&dim) {
            return s;
        }
    }
}

pub fn random_blocks<R: Rng>(rng: &mut R, s: &Shape, max_abs: i64) -> (IntMatrix, IntMatrix, IntMatrix, IntMatrix) {
    (
        random_matrix(rng, 1, s.n_a, max_abs),
        random_matrix(rng, 1, s.n_b, max_abs),
        random_matrix(rng, s.d_c, s.n_b, max_abs),
        random_matrix(rng, s.d_c, s.n_a, max_abs),
    )
}

/// Random feasible instance: the right-hand side is `E z*` for a random
/// `z*` in the box.
pub fn random_feasible_instance<R: Rng>(rng: &mut R, max_points: u128) -> FourBlockInstance {
    let s = random_shape(rng);
    let (a, b, c, d) = random_blocks(rng, &s, 2);
    let dim = s.n_b + s.n * s.n_a;
    let (l, u) = random_box(rng, dim, max_points);
    let planted: IntVector = (0..dim)
        .map(|i| BigInt::from(rng.gen_range(i64::try_from(&l[i]).unwrap()..=i64::try_from(&u[i]).unwrap())))
        .collect();
    let objective = random_objective(rng, dim);
    let e = graver_prox::fourblock::assemble_fourblock(&a, &b, &c, &d, s.n).unwrap();
    let rhs = e.mul_vec(&planted).unwrap();
    FourBlockInstance::new(a, b, c, d, s.n, l, u, rhs, objective).unwrap()
}

/// Infeasible instances: even parity kinds use even matrices with an odd
/// right-hand side entry, the others push one right-hand side entry out of
/// reach of the box.
pub fn random_infeasible_instance<R: Rng>(rng: &mut R, parity: bool, max_points: u128) -> FourBlockInstance {
    let mut inst = random_feasible_instance(rng, max_points);
    let row = rng.gen_range(0..inst.rhs.len());
    if parity {
        let double = |m: &IntMatrix| {
            let data = m
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| x * 2).collect())
                .collect();
            IntMatrix::from_rows(data, m.cols()).unwrap()
        };
        inst.a = double(&inst.a);
        inst.b = double(&inst.b);
        inst.c = double(&inst.c);
        inst.d = double(&inst.d);
        inst.rhs = inst.rhs.iter().map(|x| x * 2).collect();
        inst.rhs[row] += 1;
    } else {
        inst.rhs[row] += 100;
    }
    inst.validate().unwrap();
    inst
}

/// Random integer point of the box.
pub fn random_point<R: Rng>(rng: &mut R, l: &[BigInt], u: &[BigInt]) -> IntVector {
    l.iter()
        .zip(u)
        .map(|(l, u)| BigInt::from(rng.gen_range(i64::try_from(l).unwrap()..=i64::try_from(u).unwrap())))
        .collect()
}

pub fn rational_vec(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

/// `A = (1 1)`, `B = (1)`, no linking rows, `N = 2`, `b = (2, 2)`,
/// `f = sum z_i^2` on `[0, 5]^5`.
pub fn five_variable_example() -> FourBlockInstance {
    let a = IntMatrix::from_i64(&[&[1, 1]]);
    let b = IntMatrix::from_i64(&[&[1]]);
    let c = IntMatrix::zeros(0, 1);
    let d = IntMatrix::zeros(0, 2);
    let objective = SeparableObjective::sum_of_squares(5);
    let l = vec![BigInt::from(0); 5];
    let u = vec![BigInt::from(5); 5];
    let rhs = vec![BigInt::from(2); 2];
    FourBlockInstance::new(a, b, c, d, 2, l, u, rhs, objective).unwrap()
}
