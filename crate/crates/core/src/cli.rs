//! Command-line front end.
//!
//! Exit codes: 0 success, 1 infeasible (or a rejected point in `verify`),
//! 2 input error, 3 size guard, 4 internal consistency check failed.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::bounds::{determinant_bounds, fourblock_bounds, ppi_bound, FourBlockShape};
use crate::error::{Error, Result};
use crate::fourblock::{generate_smcf, FourBlockInstance, SmcfSpec};
use crate::graver::graver_completion;
use crate::io;
use crate::linalg::IntMatrix;
use crate::rational::{parse_rational, Rational};
use crate::solver::{brute_force_solve, solve_with, SolveOptions, SolveStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "graver-prox",
    version,
    about = "Separable convex integer minimization on N-fold 4-block matrices"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Compact JSON with sorted keys.
    #[arg(long, global = true)]
    pub canonical: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Solve an instance.
    Solve {
        input: PathBuf,
        /// Accuracy of the continuous oracle, as "p/q".
        #[arg(long, default_value = "1/2", value_parser = parse_epsilon)]
        epsilon: Rational,
        /// Augment with the Graver basis of the full matrix.
        #[arg(long)]
        use_exact_graver: bool,
        /// Also solve by enumeration and compare.
        #[arg(long)]
        brute_check: bool,
    },
    /// Graver basis of a matrix (or of an instance's matrix).
    Graver { input: PathBuf },
    /// Norm bounds for a matrix or an instance.
    Bounds { input: PathBuf },
    /// Stochastic multi-commodity flow instance from a spec file, or a random
    /// one when no file is given.
    GenSmcf {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        arcs: usize,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
    },
    /// Check a proposed solution.
    Verify {
        input: PathBuf,
        /// The point, as a JSON array.
        #[arg(long)]
        z: String,
        #[arg(long)]
        brute_check: bool,
    },
}

fn parse_epsilon(s: &str) -> std::result::Result<Rational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r <= Rational::from_integer(0.into()) {
        return Err("epsilon must be positive".into());
    }
    Ok(r)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SizeGuardExceeded(_) | Error::Overflow(_) => EXIT_GUARD,
        Error::BoundViolated(_) | Error::DecompositionFailed(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    io::parse_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

enum MatrixInput {
    Plain(IntMatrix),
    Instance(Box<FourBlockInstance>),
}

fn read_matrix_input(path: &PathBuf) -> Result<MatrixInput> {
    let v = read_json(path)?;
    if v.get("A").is_some() {
        return Ok(MatrixInput::Instance(Box::new(io::instance_from_json(&v)?)));
    }
    let m = v.get("matrix").unwrap_or(&v);
    Ok(MatrixInput::Plain(io::matrix_from_json(m, "$.matrix", None)?))
}

struct Report {
    body: Value,
    code: i32,
}

fn solve_cmd(path: &PathBuf, epsilon: &Rational, use_exact_graver: bool, brute_check: bool) -> Result<Report> {
    let inst = io::instance_from_json(&read_json(path)?)?;
    let opts = SolveOptions {
        epsilon: epsilon.clone(),
        use_exact_graver,
    };
    let out = solve_with(&inst, &opts)?;
    let mut body = io::outcome_to_json(&out);
    let code = if out.is_infeasible() { EXIT_INFEASIBLE } else { EXIT_OK };
    if brute_check {
        let brute = brute_force_solve(&inst)?;
        let agrees = match (&out.status, &brute.status) {
            (SolveStatus::Optimal { value: a, .. }, SolveStatus::Optimal { value: b, .. }) => a == b,
            (a, b) => a == b,
        };
        let obj = body.as_object_mut().expect("outcome is an object");
        obj.insert("brute_force".into(), io::outcome_to_json(&brute));
        obj.insert("brute_agrees".into(), Value::from(agrees));
        if !agrees {
            return Ok(Report {
                body,
                code: EXIT_INTERNAL,
            });
        }
    }
    Ok(Report { body, code })
}

fn graver_cmd(path: &PathBuf) -> Result<Report> {
    let m = match read_matrix_input(path)? {
        MatrixInput::Plain(m) => m,
        MatrixInput::Instance(inst) => inst.matrix(),
    };
    Ok(Report {
        body: io::graver_to_json(&graver_completion(&m)?),
        code: EXIT_OK,
    })
}

fn bounds_cmd(path: &PathBuf) -> Result<Report> {
    let (m, inst) = match read_matrix_input(path)? {
        MatrixInput::Plain(m) => (m, None),
        MatrixInput::Instance(inst) => (inst.matrix(), Some(inst)),
    };
    let mut reports = Vec::new();
    if m.rows() == 1 && m.max_abs_entry() >= 1.into() {
        let value = ppi_bound(&m.max_abs_entry())?;
        reports.push(json!({"bound_name": "ppi", "value": io::int_to_json(&value), "inputs": {"M": io::int_to_json(&m.max_abs_entry())}}));
    }
    let det = match determinant_bounds(&m, true) {
        Err(Error::SizeGuardExceeded(_)) => determinant_bounds(&m, false)?,
        other => other?,
    };
    reports.extend(det.iter().map(io::bound_report_to_json));
    let mut notes = Vec::new();
    if let Some(inst) = inst {
        if inst.n_a() == 0 {
            notes.push("4-block bounds need n_A >= 1".to_string());
        } else {
            match graver_completion(&inst.stochastic_part()) {
                Ok(stochastic) => {
                    let shape = FourBlockShape {
                        n_a: inst.n_a(),
                        n_b: inst.n_b(),
                        d_c: inst.d_c(),
                        n_blocks: inst.n,
                        max_entry: inst.top_max_entry(),
                    };
                    reports.extend(
                        fourblock_bounds(&shape, &stochastic)?
                            .iter()
                            .map(io::bound_report_to_json),
                    );
                }
                Err(Error::SizeGuardExceeded(msg)) => notes.push(format!("4-block bounds skipped: {msg}")),
                Err(e) => return Err(e),
            }
        }
    }
    let mut body = json!({"reports": reports});
    if !notes.is_empty() {
        body["notes"] = json!(notes);
    }
    Ok(Report { body, code: EXIT_OK })
}

fn gen_smcf_cmd(input: &Option<PathBuf>, seed: u64, nodes: usize, arcs: usize, blocks: usize) -> Result<Report> {
    let spec = match input {
        Some(path) => io::smcf_spec_from_json(&read_json(path)?)?,
        None => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            SmcfSpec::random(&mut rng, nodes, arcs, blocks)
        }
    };
    Ok(Report {
        body: io::instance_to_json(&generate_smcf(&spec)?),
        code: EXIT_OK,
    })
}

fn verify_cmd(path: &PathBuf, z: &str, brute_check: bool, out: &mut dyn Write) -> Result<i32> {
    let inst = io::instance_from_json(&read_json(path)?)?;
    let z = io::vector_from_json(&io::parse_json(z)?, "--z")?;
    if z.len() != inst.dim() {
        return Err(Error::DimensionMismatch(format!("--z needs {} entries", inst.dim())));
    }
    let feasible = inst.is_feasible(&z);
    let mut line = format!("feasible: {feasible}");
    let mut ok = feasible;
    if brute_check {
        let brute = brute_force_solve(&inst)?;
        let optimal = feasible && brute.value() == Some(&inst.objective.evaluate_int(&z)?);
        line.push_str(&format!(", optimal: {optimal}"));
        ok &= optimal;
    }
    if feasible {
        line.push_str(&format!(
            ", value: {}",
            crate::rational::format_rational(&inst.objective.evaluate_int(&z)?)
        ));
    }
    writeln!(out, "{line}").map_err(|e| Error::Parse(e.to_string()))?;
    Ok(if ok { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn emit(config: &CliConfig, body: &Value, out: &mut dyn Write) -> Result<()> {
    let text = io::render(body, config.canonical);
    match &config.output {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => writeln!(out, "{text}").map_err(|e| Error::Parse(e.to_string())),
    }
}

fn dispatch(config: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let report = match &config.command {
        Command::Solve {
            input,
            epsilon,
            use_exact_graver,
            brute_check,
        } => solve_cmd(input, epsilon, *use_exact_graver, *brute_check)?,
        Command::Graver { input } => graver_cmd(input)?,
        Command::Bounds { input } => bounds_cmd(input)?,
        Command::GenSmcf {
            input,
            seed,
            nodes,
            arcs,
            blocks,
        } => gen_smcf_cmd(input, *seed, *nodes, *arcs, *blocks)?,
        Command::Verify { input, z, brute_check } => return verify_cmd(input, z, *brute_check, out),
    };
    emit(config, &report.body, out)?;
    Ok(report.code)
}

/// Runs one command and returns the process exit code.
pub fn run(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(config, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
