//! N-fold 4-block matrices, problem instances and the stochastic
//! multi-commodity flow generator.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntVector};
use crate::objective::{SeparableObjective, Term};
use crate::rational::Rational;

/// Builds the matrix with top block row `(C D ... D)` and block rows
/// `(B 0 .. A .. 0)`. Blocks with zero rows or columns are allowed.
pub fn assemble_fourblock(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix, n: usize) -> Result<IntMatrix> {
    check_blocks(a, b, c, d)?;
    let (d_a, n_a, d_c, n_b) = (a.rows(), a.cols(), c.rows(), b.cols());
    let mut e = IntMatrix::zeros(d_c + n * d_a, n_b + n * n_a);
    for r in 0..d_c {
        for j in 0..n_b {
            e.set(r, j, c.get(r, j).clone());
        }
        for i in 0..n {
            for j in 0..n_a {
                e.set(r, n_b + i * n_a + j, d.get(r, j).clone());
            }
        }
    }
    for i in 0..n {
        for r in 0..d_a {
            let row = d_c + i * d_a + r;
            for j in 0..n_b {
                e.set(row, j, b.get(r, j).clone());
            }
            for j in 0..n_a {
                e.set(row, n_b + i * n_a + j, a.get(r, j).clone());
            }
        }
    }
    Ok(e)
}

fn check_blocks(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> Result<()> {
    let mismatch = |what: &str| Err(Error::DimensionMismatch(what.to_string()));
    if a.rows() != b.rows() {
        return mismatch("A and B must have the same number of rows");
    }
    if c.rows() != d.rows() {
        return mismatch("C and D must have the same number of rows");
    }
    if b.cols() != c.cols() {
        return mismatch("B and C must have the same number of columns");
    }
    if a.cols() != d.cols() {
        return mismatch("A and D must have the same number of columns");
    }
    Ok(())
}

/// `min { f(z) : E z = b, l <= z <= u, z integer }` with `E` the N-fold
/// 4-block matrix built from `A, B, C, D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourBlockInstance {
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub c: IntMatrix,
    pub d: IntMatrix,
    pub n: usize,
    pub l: IntVector,
    pub u: IntVector,
    pub rhs: IntVector,
    pub objective: SeparableObjective,
}

impl FourBlockInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: IntMatrix,
        b: IntMatrix,
        c: IntMatrix,
        d: IntMatrix,
        n: usize,
        l: IntVector,
        u: IntVector,
        rhs: IntVector,
        objective: SeparableObjective,
    ) -> Result<Self> {
        let inst = FourBlockInstance {
            a,
            b,
            c,
            d,
            n,
            l,
            u,
            rhs,
            objective,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_blocks(&self.a, &self.b, &self.c, &self.d)?;
        if self.n == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        let dim = self.dim();
        if self.l.len() != dim || self.u.len() != dim {
            return Err(Error::DimensionMismatch(format!("bounds must have {dim} entries")));
        }
        if self.objective.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "objective must have {dim} coordinates"
            )));
        }
        let rows = self.d_c() + self.n * self.d_a();
        if self.rhs.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side must have {rows} entries"
            )));
        }
        if let Some(i) = (0..dim).find(|&i| self.l[i] > self.u[i]) {
            return Err(Error::InvalidInput(format!("l > u at coordinate {i}")));
        }
        Ok(())
    }

    pub fn n_a(&self) -> usize {
        self.a.cols()
    }

    pub fn n_b(&self) -> usize {
        self.b.cols()
    }

    pub fn d_a(&self) -> usize {
        self.a.rows()
    }

    pub fn d_c(&self) -> usize {
        self.c.rows()
    }

    pub fn dim(&self) -> usize {
        self.n_b() + self.n * self.n_a()
    }

    pub fn matrix(&self) -> IntMatrix {
        assemble_fourblock(&self.a, &self.b, &self.c, &self.d, self.n).expect("validated blocks")
    }

    /// The matrix with `C` and `D` removed.
    pub fn stochastic_part(&self) -> IntMatrix {
        stochastic_part(&self.a, &self.b, self.n).expect("validated blocks")
    }

    /// The matrix with `B` and `C` removed.
    pub fn nfold_part(&self) -> IntMatrix {
        nfold_part(&self.a, &self.d, self.n).expect("validated blocks")
    }

    /// Largest absolute entry of `C` and `D`.
    pub fn top_max_entry(&self) -> BigInt {
        self.c.max_abs_entry().max(self.d.max_abs_entry())
    }

    pub fn with_box(&self, l: IntVector, u: IntVector) -> Result<Self> {
        let mut inst = self.clone();
        inst.l = l;
        inst.u = u;
        inst.validate()?;
        Ok(inst)
    }

    pub fn in_box(&self, z: &[BigInt]) -> bool {
        z.len() == self.dim()
            && z.iter()
                .zip(&self.l)
                .zip(&self.u)
                .all(|((x, lo), hi)| lo <= x && x <= hi)
    }

    pub fn is_feasible(&self, z: &[BigInt]) -> bool {
        self.in_box(z) && self.matrix().mul_vec(z).map(|r| r == self.rhs).unwrap_or(false)
    }
}

pub fn stochastic_part(a: &IntMatrix, b: &IntMatrix, n: usize) -> Result<IntMatrix> {
    let c = IntMatrix::zeros(0, b.cols());
    let d = IntMatrix::zeros(0, a.cols());
    assemble_fourblock(a, b, &c, &d, n)
}

pub fn nfold_part(a: &IntMatrix, d: &IntMatrix, n: usize) -> Result<IntMatrix> {
    let b = IntMatrix::zeros(a.rows(), 0);
    let c = IntMatrix::zeros(d.rows(), 0);
    assemble_fourblock(a, &b, &c, d, n)
}

/// Two-stage stochastic multi-commodity flow data. Commodity `i` and
/// scenario `i` share block `i`; the shorter list is padded with zero
/// demands or zero capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmcfSpec {
    pub nodes: usize,
    pub arcs: Vec<(usize, usize)>,
    /// Net supply per node, one vector per commodity.
    pub demands: Vec<Vec<BigInt>>,
    /// Capacity per arc, one vector per scenario.
    pub capacities: Vec<Vec<BigInt>>,
    /// Cost per unit of flow on each arc, paid for every commodity.
    pub flow_costs: Vec<Rational>,
    /// Strictly increasing marginal penalties for the 1st, 2nd, ... unit of
    /// excess on an arc; the last slope continues.
    pub penalty_slopes: Vec<Rational>,
    /// Optional per-scenario factor applied to the penalties.
    pub scenario_weights: Option<Vec<Rational>>,
}

impl SmcfSpec {
    fn validate(&self) -> Result<()> {
        let arcs = self.arcs.len();
        if let Some(&(p, q)) = self
            .arcs
            .iter()
            .find(|(p, q)| *p >= self.nodes || *q >= self.nodes || p == q)
        {
            return Err(Error::InvalidInput(format!("invalid arc ({p}, {q})")));
        }
        for (i, dem) in self.demands.iter().enumerate() {
            if dem.len() != self.nodes {
                return Err(Error::DimensionMismatch(format!(
                    "commodity {i} needs {} supplies",
                    self.nodes
                )));
            }
            if !dem.iter().sum::<BigInt>().is_zero() {
                return Err(Error::InvalidInput(format!("commodity {i} is unbalanced")));
            }
        }
        for (s, cap) in self.capacities.iter().enumerate() {
            if cap.len() != arcs {
                return Err(Error::DimensionMismatch(format!(
                    "scenario {s} needs {arcs} capacities"
                )));
            }
            if cap.iter().any(|c| c.is_negative()) {
                return Err(Error::InvalidInput(format!("scenario {s} has a negative capacity")));
            }
        }
        if self.flow_costs.len() != arcs {
            return Err(Error::DimensionMismatch(format!("flow costs need {arcs} entries")));
        }
        if self.penalty_slopes.is_empty() || self.penalty_slopes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "penalty slopes must be nonempty and strictly increasing".into(),
            ));
        }
        if let Some(w) = &self.scenario_weights {
            if w.len() != self.capacities.len() || w.iter().any(|x| x.is_negative()) {
                return Err(Error::InvalidInput(
                    "one nonnegative weight per scenario is required".into(),
                ));
            }
        }
        Ok(())
    }

    /// A random connected-ish instance for experiments.
    pub fn random<R: Rng>(rng: &mut R, nodes: usize, arcs: usize, blocks: usize) -> Self {
        let nodes = nodes.max(2);
        let mut arc_list = Vec::with_capacity(arcs);
        for k in 0..arcs {
            let p = if k < nodes - 1 { k } else { rng.gen_range(0..nodes) };
            let mut q = if k < nodes - 1 { k + 1 } else { rng.gen_range(0..nodes) };
            if q == p {
                q = (p + 1) % nodes;
            }
            arc_list.push((p, q));
        }
        let demands = (0..blocks)
            .map(|_| {
                let amount = rng.gen_range(0..=2i64);
                let src = rng.gen_range(0..nodes);
                let dst = (src + rng.gen_range(1..nodes)) % nodes;
                let mut v = vec![BigInt::zero(); nodes];
                v[src] += amount;
                v[dst] -= amount;
                v
            })
            .collect();
        let capacities = (0..blocks)
            .map(|_| (0..arcs).map(|_| BigInt::from(rng.gen_range(0..=2i64))).collect())
            .collect();
        let flow_costs = (0..arcs)
            .map(|_| Rational::from_integer(rng.gen_range(1..=3i64).into()))
            .collect();
        let base = rng.gen_range(1..=3i64);
        SmcfSpec {
            nodes,
            arcs: arc_list,
            demands,
            capacities,
            flow_costs,
            penalty_slopes: vec![
                Rational::from_integer(base.into()),
                Rational::from_integer((base + 2).into()),
            ],
            scenario_weights: None,
        }
    }
}

fn penalty_term(slopes: &[Rational], weight: &Rational) -> Option<Term> {
    if weight.is_zero() || (slopes.len() == 1 && slopes[0].is_zero()) {
        return None;
    }
    let scaled: Vec<Rational> = slopes.iter().map(|s| s * weight).collect();
    let mut all = vec![&scaled[0] - Rational::one()];
    all.extend(scaled.iter().cloned());
    let breakpoints = (0..scaled.len()).map(|k| Rational::from_integer(k.into())).collect();
    Some(Term::PiecewiseLinear {
        breakpoints,
        slopes: all,
        anchor: Rational::zero(),
    })
}

/// Builds the 4-block instance: first-stage variables are the aggregated
/// arc flows `x`, block `i` holds commodity flows `x^i`, capacity slacks
/// `s_i` and excess `t_i`. Rows: `sum_i x^i - x = 0`, `Inc x^i = b_i`,
/// `x + s_i - t_i = u_i`.
pub fn generate_smcf(spec: &SmcfSpec) -> Result<FourBlockInstance> {
    spec.validate()?;
    let (v, a_count) = (spec.nodes, spec.arcs.len());
    let n = spec.demands.len().max(spec.capacities.len()).max(1);
    let zero_vec = |k: usize| vec![BigInt::zero(); k];
    let demand = |i: usize| spec.demands.get(i).cloned().unwrap_or_else(|| zero_vec(v));
    let capacity = |i: usize| spec.capacities.get(i).cloned().unwrap_or_else(|| zero_vec(a_count));
    let supply = |d: &[BigInt]| d.iter().filter(|x| x.is_positive()).sum::<BigInt>();
    let total: BigInt = (0..n).map(|i| supply(&demand(i))).sum();

    let neg_identity = {
        let mut m = IntMatrix::zeros(a_count, a_count);
        for j in 0..a_count {
            m.set(j, j, BigInt::from(-1));
        }
        m
    };
    let mut d = IntMatrix::zeros(a_count, 3 * a_count);
    let mut b = IntMatrix::zeros(v + a_count, a_count);
    let mut a = IntMatrix::zeros(v + a_count, 3 * a_count);
    for (j, &(p, q)) in spec.arcs.iter().enumerate() {
        d.set(j, j, BigInt::one());
        b.set(v + j, j, BigInt::one());
        a.set(p, j, BigInt::one());
        a.set(q, j, BigInt::from(-1));
        a.set(v + j, a_count + j, BigInt::one());
        a.set(v + j, 2 * a_count + j, BigInt::from(-1));
    }

    let mut l = zero_vec(a_count);
    let mut u = vec![total.clone(); a_count];
    let mut rhs = zero_vec(a_count);
    let mut terms: Vec<Vec<Term>> = vec![Vec::new(); a_count];
    for i in 0..n {
        let dem = demand(i);
        let cap = capacity(i);
        let weight = match &spec.scenario_weights {
            Some(w) => w.get(i).cloned().unwrap_or_else(Rational::zero),
            None => Rational::one(),
        };
        rhs.extend(dem.iter().cloned());
        rhs.extend(cap.iter().cloned());
        l.extend(zero_vec(3 * a_count));
        u.extend(std::iter::repeat_n(supply(&dem), a_count));
        u.extend(cap.iter().cloned());
        u.extend(std::iter::repeat_n(total.clone(), a_count));
        for j in 0..a_count {
            let cost = &spec.flow_costs[j];
            terms.push(if cost.is_zero() {
                Vec::new()
            } else {
                vec![Term::Linear { slope: cost.clone() }]
            });
        }
        terms.extend(std::iter::repeat_n(Vec::new(), a_count));
        for _ in 0..a_count {
            terms.push(penalty_term(&spec.penalty_slopes, &weight).into_iter().collect());
        }
    }
    let objective = SeparableObjective::new(terms)?;
    FourBlockInstance::new(a, b, neg_identity, d, n, l, u, rhs, objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    fn one() -> IntMatrix {
        IntMatrix::from_i64(&[&[1]])
    }

    #[test]
    fn assembly_examples() {
        let e = assemble_fourblock(&one(), &one(), &one(), &one(), 2).unwrap();
        assert_eq!(e, IntMatrix::from_i64(&[&[1, 1, 1], &[1, 1, 0], &[1, 0, 1]]));
        let stoch = stochastic_part(&one(), &one(), 2).unwrap();
        assert_eq!(stoch, IntMatrix::from_i64(&[&[1, 1, 0], &[1, 0, 1]]));
        let nf = nfold_part(&one(), &one(), 2).unwrap();
        assert_eq!(nf, IntMatrix::from_i64(&[&[1, 1], &[1, 0], &[0, 1]]));
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let d = IntMatrix::from_i64(&[&[1, 0]]);
        assert_eq!(nfold_part(&a, &d, 1).unwrap(), IntMatrix::from_i64(&[&[1, 0], &[1, 1]]));
    }

    #[test]
    fn assembly_rejects_mismatch() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        assert!(assemble_fourblock(&a, &one(), &one(), &one(), 2).is_err());
        let two_rows = IntMatrix::from_i64(&[&[1], &[1]]);
        assert!(assemble_fourblock(&one(), &two_rows, &one(), &one(), 1).is_err());
    }

    #[test]
    fn lower_right_is_block_diagonal() {
        let a = IntMatrix::from_i64(&[&[1, 2], &[0, -1]]);
        let b = IntMatrix::from_i64(&[&[3], &[1]]);
        let c = IntMatrix::from_i64(&[&[2]]);
        let d = IntMatrix::from_i64(&[&[1, 1]]);
        let e = assemble_fourblock(&a, &b, &c, &d, 3).unwrap();
        for r in 0..6 {
            for col in 0..6 {
                let expected = if r / 2 == col / 2 {
                    a.get(r % 2, col % 2).clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(e.get(1 + r, 1 + col), &expected);
            }
        }
    }

    #[test]
    fn instance_validation() {
        let f = SeparableObjective::sum_of_squares(5);
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let inst = FourBlockInstance::new(
            a.clone(),
            one(),
            IntMatrix::zeros(0, 1),
            IntMatrix::zeros(0, 2),
            2,
            int_vec(&[0; 5]),
            int_vec(&[5; 5]),
            int_vec(&[2, 2]),
            f.clone(),
        )
        .unwrap();
        assert_eq!(inst.dim(), 5);
        assert!(inst.is_feasible(&int_vec(&[1, 1, 0, 1, 0])));
        assert!(!inst.is_feasible(&int_vec(&[1, 1, 1, 1, 0])));
        let bad = FourBlockInstance::new(
            a,
            one(),
            IntMatrix::zeros(0, 1),
            IntMatrix::zeros(0, 2),
            2,
            int_vec(&[0; 5]),
            int_vec(&[5; 5]),
            int_vec(&[2]),
            f,
        );
        assert!(bad.is_err());
    }

    fn single_arc(capacity: i64, penalty: i64) -> SmcfSpec {
        SmcfSpec {
            nodes: 2,
            arcs: vec![(0, 1)],
            demands: vec![int_vec(&[1, -1])],
            capacities: vec![int_vec(&[capacity])],
            flow_costs: vec![Rational::one()],
            penalty_slopes: vec![Rational::from_integer(penalty.into())],
            scenario_weights: None,
        }
    }

    #[test]
    fn smcf_structure() {
        let inst = generate_smcf(&single_arc(1, 0)).unwrap();
        assert_eq!(
            (inst.n_b(), inst.n_a(), inst.d_c(), inst.d_a(), inst.n),
            (1, 3, 1, 3, 1)
        );
        assert_eq!(inst.c, IntMatrix::from_i64(&[&[-1]]));
        assert_eq!(inst.d, IntMatrix::from_i64(&[&[1, 0, 0]]));
        assert_eq!(inst.b, IntMatrix::from_i64(&[&[0], &[0], &[1]]));
        assert_eq!(inst.a, IntMatrix::from_i64(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, -1]]));
        assert_eq!(inst.rhs, int_vec(&[0, 1, -1, 1]));
        assert!(inst.is_feasible(&int_vec(&[1, 1, 0, 0])));
    }

    #[test]
    fn smcf_rejects_bad_specs() {
        let mut spec = single_arc(1, 0);
        spec.demands = vec![int_vec(&[1, 0])];
        assert!(generate_smcf(&spec).is_err());
        let mut spec = single_arc(1, 0);
        spec.capacities = vec![int_vec(&[-1])];
        assert!(generate_smcf(&spec).is_err());
        let mut spec = single_arc(1, 0);
        spec.arcs = vec![(0, 2)];
        assert!(generate_smcf(&spec).is_err());
    }

    #[test]
    fn smcf_pads_blocks() {
        let mut spec = single_arc(1, 1);
        spec.capacities.push(int_vec(&[0]));
        let inst = generate_smcf(&spec).unwrap();
        assert_eq!(inst.n, 2);
        assert_eq!(inst.rhs, int_vec(&[0, 1, -1, 1, 0, 0, 0]));
        let mut empty = single_arc(0, 1);
        empty.demands.clear();
        empty.capacities.clear();
        let inst = generate_smcf(&empty).unwrap();
        assert!(inst.rhs.iter().all(Zero::is_zero));
        assert!(inst.is_feasible(&vec![BigInt::zero(); inst.dim()]));
    }

    #[test]
    fn random_specs_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let spec = SmcfSpec::random(&mut rng, 3, 3, 2);
            let inst = generate_smcf(&spec).unwrap();
            inst.validate().unwrap();
        }
    }
}
