//! The proximity pipeline: continuous oracle, box restriction, phase one
//! and Graver augmentation.

pub mod augment;
pub mod brute;
mod phase_one;
pub mod structured;

pub use augment::{directed_step, graver_best_step};
pub use brute::{brute_force_solve, enumerate_feasible};
pub use structured::{structured_xbar_step, StructuredContext};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bounds::{fourblock_bounds, BoundReport, FourBlockShape};
use crate::continuous::{approx_continuous_oracle, ContinuousOutcome};
use crate::error::{Error, Result};
use crate::fourblock::FourBlockInstance;
use crate::graver::{graver_completion, l1_norm, GraverBasis};
use crate::linalg::{HermiteSystem, IntVector};
use crate::objective::{DirectedObjective, StepCost};
use crate::rational::{ceil, floor, int_rat, Rational};

use augment::{best_graver_move, check_in_box, Move};
use phase_one::drive_into_box;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub epsilon: Rational,
    /// Augment with the Graver basis of the full matrix instead of the
    /// structured first-stage enumeration.
    pub use_exact_graver: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: Rational::new(BigInt::one(), BigInt::from(2)),
            use_exact_graver: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedBox {
    pub l: IntVector,
    pub u: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrailStep {
    pub step: IntVector,
    pub before: Rational,
    pub after: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal { z: IntVector, value: Rational },
    Infeasible,
    Unbounded,
}

/// Where the proximity radius came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllSource {
    /// Largest entry of the full Graver basis.
    ExactGraver,
    /// Minimum of the two 4-block 1-norm bounds.
    FourBlockBound,
    /// Neither was computable; the box was not restricted.
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximityInfo {
    pub continuous_point: Vec<Rational>,
    pub continuous_value: Rational,
    pub ell: Option<BigInt>,
    pub ell_source: EllSource,
    pub bound_reports: Vec<BoundReport>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub trail: Vec<TrailStep>,
    pub restricted_box: Option<RestrictedBox>,
    pub proximity: Option<ProximityInfo>,
}

impl SolveOutcome {
    fn bare(status: SolveStatus) -> Self {
        SolveOutcome {
            status,
            trail: Vec::new(),
            restricted_box: None,
            proximity: None,
        }
    }

    pub fn z(&self) -> Option<&IntVector> {
        match &self.status {
            SolveStatus::Optimal { z, .. } => Some(z),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match &self.status {
            SolveStatus::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == SolveStatus::Infeasible
    }
}

/// Graver data and bounds computed once per instance.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub full_basis: Option<GraverBasis>,
    pub bound_reports: Vec<BoundReport>,
    pub fourblock_min: Option<BigInt>,
    pub ell: Option<BigInt>,
    pub ell_source: EllSource,
    pub xbar_l1_bound: Option<BigInt>,
}

fn within_guards(r: Result<GraverBasis>) -> Result<Option<GraverBasis>> {
    match r {
        Ok(g) => Ok(Some(g)),
        Err(Error::SizeGuardExceeded(_)) | Err(Error::Overflow(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Computes the full Graver basis and the 4-block bounds where the guards
/// allow, and checks the computed basis against the bounds.
pub fn analyze(instance: &FourBlockInstance) -> Result<Analysis> {
    let e = instance.matrix();
    let full_basis = within_guards(graver_completion(&e))?;
    let mut bound_reports = Vec::new();
    let mut fourblock_min = None;
    if instance.n_a() >= 1 {
        let stochastic = if instance.d_c() == 0 {
            full_basis.clone()
        } else {
            within_guards(graver_completion(&instance.stochastic_part()))?
        };
        if let Some(stochastic) = stochastic {
            let shape = FourBlockShape {
                n_a: instance.n_a(),
                n_b: instance.n_b(),
                d_c: instance.d_c(),
                n_blocks: instance.n,
                max_entry: instance.top_max_entry(),
            };
            bound_reports = fourblock_bounds(&shape, &stochastic)?;
            fourblock_min = bound_reports
                .iter()
                .find(|r| r.bound_name == "fourblock_min")
                .map(|r| r.value.clone());
        }
    }
    if let (Some(g), Some(bound)) = (&full_basis, &fourblock_min) {
        if g.max_l1() > bound {
            return Err(Error::BoundViolated(format!(
                "Graver basis has 1-norm {} above the 4-block bound {bound}",
                g.max_l1()
            )));
        }
    }
    let n_b = instance.n_b();
    let (ell, ell_source, xbar_l1_bound) = match (&full_basis, &fourblock_min) {
        (Some(g), _) => {
            let xbar = g
                .elements()
                .iter()
                .map(|v| l1_norm(&v[..n_b]))
                .max()
                .unwrap_or_else(BigInt::zero);
            (Some(g.max_linf().clone()), EllSource::ExactGraver, Some(xbar))
        }
        (None, Some(b)) => (Some(b.clone()), EllSource::FourBlockBound, Some(b.clone())),
        (None, None) => (None, EllSource::Unavailable, None),
    };
    Ok(Analysis {
        full_basis,
        bound_reports,
        fourblock_min,
        ell,
        ell_source,
        xbar_l1_bound,
    })
}

/// Augmentation machinery bound to one instance and box.
pub struct Engine {
    instance: FourBlockInstance,
    full: Option<GraverBasis>,
    structured: Option<StructuredContext>,
}

impl Engine {
    pub fn new(instance: &FourBlockInstance, analysis: &Analysis, use_exact_graver: bool) -> Result<Self> {
        if use_exact_graver {
            let Some(full) = analysis.full_basis.clone() else {
                return Err(Error::SizeGuardExceeded(
                    "the full Graver basis is not computable".into(),
                ));
            };
            return Ok(Engine {
                instance: instance.clone(),
                full: Some(full),
                structured: None,
            });
        }
        let ctx = StructuredContext::new(instance, analysis.xbar_l1_bound.clone())?;
        if let Some(bound) = &analysis.fourblock_min {
            if ctx.nfold_basis().max_l1() > bound {
                return Err(Error::BoundViolated(
                    "N-fold Graver element above the 4-block bound".into(),
                ));
            }
        }
        Ok(Engine {
            instance: instance.clone(),
            full: None,
            structured: Some(ctx),
        })
    }

    fn best_move<C: StepCost + ?Sized>(
        &self,
        cost: &C,
        z: &[BigInt],
        l: &[BigInt],
        u: &[BigInt],
    ) -> Result<Option<Move>> {
        match (&self.full, &self.structured) {
            (Some(g), _) => {
                check_in_box(z, l, u)?;
                Ok(best_graver_move(g.elements(), cost, z, l, u))
            }
            (None, Some(ctx)) => ctx.best_move(cost, z, l, u),
            (None, None) => unreachable!("engine always has a step oracle"),
        }
    }

    /// A feasible point of the instance, or `None` if there is none.
    pub fn phase_one(&self) -> Result<Option<IntVector>> {
        let inst = &self.instance;
        let Some(z) = HermiteSystem::new(&inst.matrix()).solve(&inst.rhs)? else {
            return Ok(None);
        };
        let mut oracle = |h: &DirectedObjective, z: &[BigInt], l: &[BigInt], u: &[BigInt]| {
            Ok(self.best_move(h, z, l, u)?.map(|m| m.v))
        };
        drive_into_box(z, &inst.l, &inst.u, &mut oracle)
    }

    /// Augments from the feasible `z0` until no improving step is left.
    pub fn optimize(&self, z0: IntVector) -> Result<SolveOutcome> {
        let inst = &self.instance;
        if !inst.is_feasible(&z0) {
            return Err(Error::InfeasiblePoint("start point is not feasible".into()));
        }
        let f = &inst.objective;
        let mut z = z0;
        let mut value = f.evaluate_int(&z)?;
        let mut trail = Vec::new();
        while let Some(m) = self.best_move(f, &z, &inst.l, &inst.u)? {
            for (a, b) in z.iter_mut().zip(&m.v) {
                *a += b;
            }
            let after = f.evaluate_int(&z)?;
            debug_assert_eq!(&after - &value, m.delta);
            trail.push(TrailStep {
                step: m.v,
                before: value,
                after: after.clone(),
            });
            value = after;
        }
        let restricted_box = Some(RestrictedBox {
            l: inst.l.clone(),
            u: inst.u.clone(),
        });
        Ok(SolveOutcome {
            status: SolveStatus::Optimal { z, value },
            trail,
            restricted_box,
            proximity: None,
        })
    }
}

/// A feasible point of `instance`, or `None` if it has none.
pub fn phase_one(instance: &FourBlockInstance) -> Result<Option<IntVector>> {
    instance.validate()?;
    let analysis = analyze(instance)?;
    Engine::new(instance, &analysis, false)?.phase_one()
}

/// Optimizes `instance` restricted to `bx`, starting from the feasible `z0`.
pub fn optimize_restricted(
    instance: &FourBlockInstance,
    bx: &RestrictedBox,
    z0: IntVector,
    options: &SolveOptions,
) -> Result<SolveOutcome> {
    let restricted = instance.with_box(bx.l.clone(), bx.u.clone())?;
    let analysis = analyze(&restricted)?;
    Engine::new(&restricted, &analysis, options.use_exact_graver)?.optimize(z0)
}

/// `max(l, floor(r - radius))` and `min(u, ceil(r + radius))`.
pub fn proximity_box(l: &[BigInt], u: &[BigInt], r: &[Rational], radius: &Rational) -> RestrictedBox {
    let lo = (0..l.len())
        .map(|i| l[i].clone().max(floor(&(&r[i] - radius))))
        .collect();
    let hi = (0..u.len())
        .map(|i| u[i].clone().min(ceil(&(&r[i] + radius))))
        .collect();
    RestrictedBox { l: lo, u: hi }
}

pub fn solve(instance: &FourBlockInstance, epsilon: &Rational) -> Result<SolveOutcome> {
    solve_with(
        instance,
        &SolveOptions {
            epsilon: epsilon.clone(),
            ..SolveOptions::default()
        },
    )
}

/// Continuous oracle, proximity box of radius `n * ell + eps`, phase one on
/// the restricted instance, then augmentation to optimality.
pub fn solve_with(instance: &FourBlockInstance, options: &SolveOptions) -> Result<SolveOutcome> {
    instance.validate()?;
    let (point, continuous_value) = match approx_continuous_oracle(instance, &options.epsilon)? {
        ContinuousOutcome::Feasible { point, value } => (point, value),
        ContinuousOutcome::Infeasible => return Ok(SolveOutcome::bare(SolveStatus::Infeasible)),
        ContinuousOutcome::Unbounded => return Ok(SolveOutcome::bare(SolveStatus::Unbounded)),
    };
    let analysis = analyze(instance)?;
    let bx = match &analysis.ell {
        Some(ell) => {
            let radius = int_rat(&(BigInt::from(instance.dim()) * ell)) + &options.epsilon;
            proximity_box(&instance.l, &instance.u, &point, &radius)
        }
        None => RestrictedBox {
            l: instance.l.clone(),
            u: instance.u.clone(),
        },
    };
    let proximity = ProximityInfo {
        continuous_point: point,
        continuous_value,
        ell: analysis.ell.clone(),
        ell_source: analysis.ell_source,
        bound_reports: analysis.bound_reports.clone(),
    };
    let restricted = instance.with_box(bx.l.clone(), bx.u.clone())?;
    let engine = Engine::new(&restricted, &analysis, options.use_exact_graver)?;
    let mut outcome = match engine.phase_one()? {
        Some(z0) => engine.optimize(z0)?,
        None => SolveOutcome::bare(SolveStatus::Infeasible),
    };
    outcome.restricted_box = Some(bx);
    outcome.proximity = Some(proximity);
    Ok(outcome)
}
