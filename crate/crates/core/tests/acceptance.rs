//! Acceptance criteria 1 to 9. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use graver_prox::bounds::{
    determinant_bounds, hadamard_bound, ppi_bound, relaxed_ppi_bound, stacked_bound, stacked_intermediate_bound,
    BoundReport,
};
use graver_prox::continuous::{approx_continuous_oracle, pl_relaxation, ContinuousOutcome};
use graver_prox::fourblock::stochastic_part;
use graver_prox::graver::{expand_repeated_columns, graver_brute_force, graver_completion};
use graver_prox::linalg::{max_abs_subdeterminant, IntMatrix};
use graver_prox::objective::{SeparableObjective, Term};
use graver_prox::rational::{int_rat, rat, Rational};
use graver_prox::solver::{
    brute_force_solve, enumerate_feasible, graver_best_step, optimize_restricted, proximity_box, solve, RestrictedBox,
    SolveOptions, SolveStatus,
};

struct Verdict {
    ok: bool,
    detail: String,
}

fn report(number: u32, name: &str, started: Instant, budget: Option<Duration>, verdict: Verdict) -> bool {
    let elapsed = started.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let ok = verdict.ok && in_time;
    let timing = match budget {
        Some(b) => format!("{:.2}s of {}s", elapsed.as_secs_f64(), b.as_secs()),
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!(
        "criterion {number} {name}: {} ({}; {timing})",
        if ok { "PASS" } else { "FAIL" },
        verdict.detail
    );
    ok
}

fn bound_value(reports: &[BoundReport], name: &str) -> BigInt {
    reports.iter().find(|r| r.bound_name == name).unwrap().value.clone()
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let count = 24;
    let mut total_elements = 0;
    for case in 0..count {
        let rows = rng.gen_range(1..=2);
        let cols = rng.gen_range(2..=4);
        let e = random_matrix_with_max(&mut rng, rows, cols, 3);
        let radius = bound_value(&determinant_bounds(&e, true).unwrap(), "determinant_exact");
        let completion = graver_completion(&e).unwrap();
        let brute = graver_brute_force(&e, i64::try_from(&radius).unwrap().max(1)).unwrap();
        total_elements += completion.len();
        if completion != brute {
            failures.push(case);
        }
    }
    Verdict {
        ok: failures.is_empty(),
        detail: format!("{count} matrices, {total_elements} Graver elements, mismatches at {failures:?}"),
    }
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let count = 12;
    let mut bad = Vec::new();
    for case in 0..count {
        let rows = rng.gen_range(1..=2);
        let cols = rng.gen_range(2..=3);
        let f = random_matrix_with_max(&mut rng, rows, cols, 3);
        let c = rng.gen_range(0..cols);
        let base = graver_completion(&f).unwrap();
        let expanded = expand_repeated_columns(&base, c).unwrap();
        let direct = graver_completion(&f.with_repeated_column(c).unwrap()).unwrap();
        let identity = expanded.max_l1() == &base.max_l1().clone().max(BigInt::from(2));
        if expanded != direct || !identity {
            bad.push(case);
        }
    }
    Verdict {
        ok: bad.is_empty(),
        detail: format!("{count} matrices, failures at {bad:?}"),
    }
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = 32;
    let mut violations: Vec<String> = Vec::new();
    let mut intermediate_checked = 0;

    for case in 0..cases {
        let m = [1, 2, 3, 4][case % 4];
        let cols = rng.gen_range(2..=5);
        let e = random_matrix_with_max(&mut rng, 1, cols, m);
        let g = graver_completion(&e).unwrap();
        let bound = if m == 1 {
            relaxed_ppi_bound(&BigInt::from(m)).unwrap()
        } else {
            ppi_bound(&BigInt::from(m)).unwrap()
        };
        if g.max_l1() > &bound {
            violations.push(format!("ppi case {case}"));
        }
    }

    for case in 0..cases {
        let rows = rng.gen_range(1..=3);
        let cols = rng.gen_range(rows + 1..=5);
        let e = random_matrix_with_max(&mut rng, rows, cols, 3);
        let g = graver_completion(&e).unwrap();
        let reports = determinant_bounds(&e, true).unwrap();
        for name in ["determinant_exact", "determinant_hadamard"] {
            if g.max_l1() > &bound_value(&reports, name) {
                violations.push(format!("{name} case {case}"));
            }
        }
        // a repeated column contributes (1, -1), so the aggregated form
        // only holds as max(2, .)
        let aggregated = bound_value(&reports, "determinant_aggregated").max(BigInt::from(2));
        if g.max_l1() > &aggregated {
            violations.push(format!("determinant_aggregated case {case}"));
        }
        let (delta, _) = max_abs_subdeterminant(&e).unwrap();
        if delta > hadamard_bound(rows, &e.max_abs_entry()) {
            violations.push(format!("hadamard case {case}"));
        }
    }

    for case in 0..cases {
        let cols = rng.gen_range(2..=4);
        let f_rows = rng.gen_range(1..=2);
        let l_rows = rng.gen_range(1..=2);
        let f = random_matrix_with_max(&mut rng, f_rows, cols, 2);
        let lower = random_matrix_with_max(&mut rng, l_rows, cols, 2);
        let g_lower = graver_completion(&lower).unwrap();
        let g_full = graver_completion(&f.vstack(&lower).unwrap()).unwrap();
        let stacked = stacked_bound(g_lower.max_l1(), cols, &f.max_abs_entry(), f_rows as u32).unwrap();
        if g_full.max_l1() > &stacked {
            violations.push(format!("stacked case {case}"));
        }
        if g_lower.len() <= 8 {
            intermediate_checked += 1;
            let intermediate = stacked_intermediate_bound(&f, &g_lower).unwrap();
            if g_full.max_l1() > &intermediate {
                violations.push(format!("stacked intermediate case {case}"));
            }
        }
    }

    Verdict {
        ok: violations.is_empty(),
        detail: format!(
            "{cases} cases per bound family, intermediate stacked bound on {intermediate_checked}, violations {violations:?}"
        ),
    }
}

fn criterion_4() -> Verdict {
    let pairs = [
        (IntMatrix::from_i64(&[&[1, 2]]), IntMatrix::from_i64(&[&[1]])),
        (IntMatrix::from_i64(&[&[2, 1]]), IntMatrix::from_i64(&[&[1, -1]])),
        (IntMatrix::from_i64(&[&[1, -1]]), IntMatrix::from_i64(&[&[1, 2]])),
    ];
    let mut ok = true;
    let mut seen = Vec::new();
    for (a, b) in &pairs {
        let norms: Vec<BigInt> = (1..=3)
            .map(|n| {
                graver_completion(&stochastic_part(a, b, n).unwrap())
                    .unwrap()
                    .max_linf()
                    .clone()
            })
            .collect();
        ok &= norms.iter().all(|x| x == &norms[0]);
        seen.push(norms);
    }
    Verdict {
        ok,
        detail: format!("max linf for N = 1, 2, 3: {seen:?}"),
    }
}

fn optimum(out: &graver_prox::SolveOutcome) -> Option<Rational> {
    out.value().cloned()
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let count = 40;
    let mut bad = Vec::new();
    let mut restricted = 0;
    for case in 0..count {
        let inst = random_feasible_instance(&mut rng, 200_000);
        let ContinuousOutcome::Feasible { point, .. } = pl_relaxation(&inst, &rat(1, 4)).unwrap() else {
            bad.push(case);
            continue;
        };
        let ell = graver_completion(&inst.matrix()).unwrap().max_linf().clone();
        let radius = int_rat(&(BigInt::from(inst.dim()) * ell));
        let bx = proximity_box(&inst.l, &inst.u, &point, &radius);
        if lattice_size(&bx.l, &bx.u) < lattice_size(&inst.l, &inst.u) {
            restricted += 1;
        }
        let full = optimum(&brute_force_solve(&inst).unwrap());
        let near = optimum(&brute_force_solve(&inst.with_box(bx.l, bx.u).unwrap()).unwrap());
        if full.is_none() || full != near {
            bad.push(case);
        }
    }
    Verdict {
        ok: bad.is_empty(),
        detail: format!("{count} instances, {restricted} with a strictly smaller box, mismatches at {bad:?}"),
    }
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let eps = rat(1, 2);
    let feasible = 30;
    let mut bad = Vec::new();
    for case in 0..feasible {
        let inst = random_feasible_instance(&mut rng, 200_000);
        let ours = solve(&inst, &eps).unwrap();
        let brute = brute_force_solve(&inst).unwrap();
        let certified = ours.z().is_some_and(|z| inst.is_feasible(z));
        if ours.value().is_none() || ours.value() != brute.value() || !certified {
            bad.push(format!("feasible {case}"));
        }
    }
    let infeasible = 6;
    for case in 0..infeasible {
        let inst = random_infeasible_instance(&mut rng, case % 2 == 0, 200_000);
        let ours = solve(&inst, &eps).unwrap();
        let brute = brute_force_solve(&inst).unwrap();
        if !ours.is_infeasible() || !brute.is_infeasible() {
            bad.push(format!("infeasible {case}"));
        }
    }
    Verdict {
        ok: bad.is_empty(),
        detail: format!("{feasible} feasible and {infeasible} infeasible instances, failures {bad:?}"),
    }
}

fn random_pl_term<R: Rng>(rng: &mut R) -> Term {
    let k = rng.gen_range(1..=4);
    let mut breakpoints = Vec::new();
    let mut x = rat(rng.gen_range(-12..=0), 2);
    for _ in 0..k {
        breakpoints.push(x.clone());
        x += rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
    }
    let mut slopes = Vec::new();
    let mut s = rat(rng.gen_range(-6..=0), 1);
    for _ in 0..=k {
        slopes.push(s.clone());
        s += rat(rng.gen_range(1..=5), rng.gen_range(1..=2));
    }
    Term::PiecewiseLinear {
        breakpoints,
        slopes,
        anchor: rat(rng.gen_range(-3..=3), 1),
    }
}

fn family_objective<R: Rng>(rng: &mut R, family: &str, dim: usize) -> SeparableObjective {
    let terms = (0..dim)
        .map(|_| match family {
            "quadratic" => vec![Term::Quadratic {
                coeff: rat(rng.gen_range(0..=4), 2),
                center: rat(rng.gen_range(-9..=9), 3),
            }],
            "absdev" => vec![Term::AbsDev {
                weight: rat(rng.gen_range(0..=3), 1),
                center: BigInt::from(rng.gen_range(-5..=5)),
            }],
            "linear" => vec![Term::Linear {
                slope: rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)),
            }],
            "piecewise-linear" => vec![random_pl_term(rng)],
            _ => {
                let mut t = random_term(rng);
                t.push(random_pl_term(rng));
                t
            }
        })
        .collect();
    SeparableObjective::new(terms).unwrap()
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let families = ["quadratic", "absdev", "linear", "piecewise-linear", "mixed"];
    let triples = 250;
    let dim = 4;
    let mut violations = 0;
    for family in families {
        for _ in 0..triples {
            let f = family_objective(&mut rng, family, dim);
            let z: Vec<BigInt> = (0..dim).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect();
            let mut u = Vec::new();
            let mut v = Vec::new();
            for _ in 0..dim {
                let sign: i64 = [-1, 0, 1][rng.gen_range(0..3)];
                u.push(BigInt::from(sign * rng.gen_range(0..=4)));
                v.push(BigInt::from(sign * rng.gen_range(0..=4)));
            }
            let add = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
            let fz = f.evaluate_int(&z).unwrap();
            let zu = add(&z, &u);
            let zv = add(&z, &v);
            let zuv = add(&zu, &v);
            let lhs = f.evaluate_int(&zuv).unwrap() - &fz;
            let rhs = (f.evaluate_int(&zu).unwrap() - &fz) + (f.evaluate_int(&zv).unwrap() - &fz);
            if lhs < rhs {
                violations += 1;
            }
        }
    }
    Verdict {
        ok: violations == 0,
        detail: format!(
            "{triples} triples for each of {} families, {violations} violations",
            families.len()
        ),
    }
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let count = 10;
    let starts = 10;
    let mut bad = Vec::new();
    for case in 0..count {
        let inst = random_feasible_instance(&mut rng, 50_000);
        let brute = brute_force_solve(&inst).unwrap();
        let best = brute.value().cloned().unwrap();
        let points = enumerate_feasible(&inst).unwrap();
        let graver = graver_completion(&inst.matrix()).unwrap();
        let full = RestrictedBox {
            l: inst.l.clone(),
            u: inst.u.clone(),
        };
        for start in 0..starts {
            let z0 = points[rng.gen_range(0..points.len())].clone();
            let opts = SolveOptions {
                use_exact_graver: start % 2 == 1,
                ..SolveOptions::default()
            };
            let out = optimize_restricted(&inst, &full, z0, &opts).unwrap();
            let SolveStatus::Optimal { z, value } = &out.status else {
                bad.push(format!("instance {case} start {start}: not optimal"));
                continue;
            };
            let stuck = graver_best_step(&graver, z, &inst.objective, &inst.l, &inst.u)
                .unwrap()
                .is_none();
            if value != &best || !stuck || !inst.is_feasible(z) {
                bad.push(format!("instance {case} start {start}"));
            }
        }
    }
    Verdict {
        ok: bad.is_empty(),
        detail: format!("{count} instances with {starts} starts each, failures {bad:?}"),
    }
}

fn criterion_9() -> Verdict {
    let inst = five_variable_example();
    let half = rat(1, 2);
    let expected_point = vec![Rational::one(), half.clone(), half.clone(), half.clone(), half.clone()];
    let mut notes = Vec::new();
    let continuous_ok = match approx_continuous_oracle(&inst, &half).unwrap() {
        ContinuousOutcome::Feasible { point, value } => {
            notes.push(format!("continuous value {value}"));
            point == expected_point && value == rat(2, 1)
        }
        _ => false,
    };
    let exact_value = inst.objective.evaluate(&expected_point).unwrap();
    let ours = solve(&inst, &half).unwrap();
    let brute = brute_force_solve(&inst).unwrap();
    let three = rat(3, 1);
    let integer_ok = ours.value() == Some(&three) && brute.value() == Some(&three);
    notes.push(format!(
        "integer optimum {} (brute force {})",
        ours.value().map(|v| v.to_string()).unwrap_or_default(),
        brute.value().map(|v| v.to_string()).unwrap_or_default()
    ));
    Verdict {
        ok: continuous_ok && exact_value == rat(2, 1) && integer_ok,
        detail: notes.join(", "),
    }
}

type Criterion = (u32, &'static str, Option<u64>, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "graver-correctness", Some(10), criterion_1),
        (2, "aggregation", None, criterion_2),
        (3, "bound-suites", None, criterion_3),
        (4, "stochastic-linf-stability", Some(20), criterion_4),
        (5, "proximity", None, criterion_5),
        (6, "oracle-equivalence", Some(60), criterion_6),
        (7, "superadditivity", None, criterion_7),
        (8, "certificate-and-path-independence", None, criterion_8),
        (9, "worked-example", None, criterion_9),
    ];
    let mut failed = 0;
    for (number, name, budget, run) in criteria {
        let started = Instant::now();
        let verdict = match std::panic::catch_unwind(run) {
            Ok(v) => v,
            Err(_) => Verdict {
                ok: false,
                detail: "panicked".into(),
            },
        };
        if !report(number, name, started, budget.map(Duration::from_secs), verdict) {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
