//! JSON reading and writing for instances, SMCF specs and results.
//!
//! Integers are JSON numbers (or decimal strings when they do not fit in 64
//! bits); rationals are `"p/q"` strings, plain integers are accepted too.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::fourblock::{FourBlockInstance, SmcfSpec};
use crate::graver::GraverBasis;
use crate::linalg::{IntMatrix, IntVector};
use crate::objective::{SeparableObjective, Term};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::solver::{SolveOutcome, SolveStatus};

fn schema(path: &str, msg: &str) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

/// Parses JSON text; syntax errors name the line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn int_to_json(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(x) => Value::from(x),
        Err(_) => Value::String(v.to_string()),
    }
}

pub fn int_from_json(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_i64() {
                Ok(BigInt::from(x))
            } else if let Some(x) = n.as_u64() {
                Ok(BigInt::from(x))
            } else {
                Err(schema(path, "expected an integer"))
            }
        }
        Value::String(s) => s.trim().parse().map_err(|_| schema(path, "expected an integer")),
        _ => Err(schema(path, "expected an integer")),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| schema(path, &e.to_string())),
        Value::Number(_) => Ok(Rational::from_integer(int_from_json(v, path)?)),
        _ => Err(schema(path, "expected a rational \"p/q\"")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn usize_from_json(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

pub fn vector_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn vector_from_json(v: &Value, path: &str) -> Result<IntVector> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| int_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

fn rationals_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

fn rationals_from_json(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| vector_to_json(m.row(r))).collect())
}

/// Rows of integers; `cols` is used when there are no rows.
pub fn matrix_from_json(v: &Value, path: &str, cols: Option<usize>) -> Result<IntMatrix> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json(r, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let width = match rows.first() {
        Some(r) => r.len(),
        None => cols.unwrap_or(0),
    };
    IntMatrix::from_rows(rows, width).map_err(|e| schema(path, &e.to_string()))
}

pub fn term_to_json(t: &Term) -> Value {
    match t {
        Term::Linear { slope } => json!({"kind": "linear", "slope": rational_to_json(slope)}),
        Term::AbsDev { weight, center } => {
            json!({"kind": "absdev", "weight": rational_to_json(weight), "center": int_to_json(center)})
        }
        Term::Quadratic { coeff, center } => {
            json!({"kind": "quadratic", "coeff": rational_to_json(coeff), "center": rational_to_json(center)})
        }
        Term::PiecewiseLinear {
            breakpoints,
            slopes,
            anchor,
        } => json!({
            "kind": "pl",
            "breakpoints": rationals_to_json(breakpoints),
            "slopes": rationals_to_json(slopes),
            "anchor": rational_to_json(anchor),
        }),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(path, &format!("missing key \"{key}\"")))
}

pub fn term_from_json(v: &Value, path: &str) -> Result<Term> {
    let obj = v.as_object().ok_or_else(|| schema(path, "expected a term object"))?;
    let kind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| schema(path, "\"kind\" must be a string"))?;
    let rat = |key: &str| rational_from_json(field(obj, key, path)?, &format!("{path}.{key}"));
    let term = match kind {
        "linear" => Term::Linear { slope: rat("slope")? },
        "absdev" => Term::AbsDev {
            weight: rat("weight")?,
            center: int_from_json(field(obj, "center", path)?, &format!("{path}.center"))?,
        },
        "quadratic" => Term::Quadratic {
            coeff: rat("coeff")?,
            center: match obj.get("center") {
                Some(c) => rational_from_json(c, &format!("{path}.center"))?,
                None => Rational::from_integer(0.into()),
            },
        },
        "pl" => Term::PiecewiseLinear {
            breakpoints: rationals_from_json(field(obj, "breakpoints", path)?, &format!("{path}.breakpoints"))?,
            slopes: rationals_from_json(field(obj, "slopes", path)?, &format!("{path}.slopes"))?,
            anchor: match obj.get("anchor") {
                Some(a) => rational_from_json(a, &format!("{path}.anchor"))?,
                None => Rational::from_integer(0.into()),
            },
        },
        other => return Err(schema(path, &format!("unknown term kind \"{other}\""))),
    };
    term.validate().map_err(|e| schema(path, &e.to_string()))?;
    Ok(term)
}

pub fn objective_to_json(f: &SeparableObjective) -> Value {
    Value::Array(
        f.terms()
            .iter()
            .map(|ts| Value::Array(ts.iter().map(term_to_json).collect()))
            .collect(),
    )
}

/// One entry per coordinate: an array of terms, a single term object, or
/// `null` for the zero function.
pub fn objective_from_json(v: &Value, path: &str) -> Result<SeparableObjective> {
    let mut terms = Vec::new();
    for (i, entry) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        terms.push(match entry {
            Value::Null => Vec::new(),
            Value::Object(_) => vec![term_from_json(entry, &p)?],
            Value::Array(list) => list
                .iter()
                .enumerate()
                .map(|(k, t)| term_from_json(t, &format!("{p}[{k}]")))
                .collect::<Result<_>>()?,
            _ => return Err(schema(&p, "expected a term, a list of terms or null")),
        });
    }
    SeparableObjective::new(terms).map_err(|e| schema(path, &e.to_string()))
}

pub fn instance_to_json(inst: &FourBlockInstance) -> Value {
    json!({
        "A": matrix_to_json(&inst.a),
        "B": matrix_to_json(&inst.b),
        "C": matrix_to_json(&inst.c),
        "D": matrix_to_json(&inst.d),
        "N": inst.n,
        "n_A": inst.n_a(),
        "n_B": inst.n_b(),
        "l": vector_to_json(&inst.l),
        "u": vector_to_json(&inst.u),
        "b": vector_to_json(&inst.rhs),
        "objective": objective_to_json(&inst.objective),
    })
}

fn row_count(v: &Value, path: &str) -> Result<usize> {
    Ok(array(v, path)?.len())
}

fn first_row_len(v: &Value) -> Option<usize> {
    v.as_array()?.first()?.as_array().map(|r| r.len())
}

pub fn instance_from_json(v: &Value) -> Result<FourBlockInstance> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema("$", "expected an instance object"))?;
    let get = |k: &str| field(obj, k, "$");
    let n = usize_from_json(get("N")?, "$.N")?;
    let l = vector_from_json(get("l")?, "$.l")?;
    let u = vector_from_json(get("u")?, "$.u")?;
    let rhs = vector_from_json(get("b")?, "$.b")?;
    let (a, b, c, d) = (get("A")?, get("B")?, get("C")?, get("D")?);

    let explicit = |k: &str| obj.get(k).map(|x| usize_from_json(x, &format!("$.{k}"))).transpose();
    let mut n_a = explicit("n_A")?
        .or_else(|| first_row_len(a))
        .or_else(|| first_row_len(d));
    let mut n_b = explicit("n_B")?
        .or_else(|| first_row_len(b))
        .or_else(|| first_row_len(c));
    if n == 0 {
        return Err(schema("$.N", "N must be positive"));
    }
    match (n_a, n_b) {
        (Some(x), None) => n_b = l.len().checked_sub(n * x),
        (None, Some(y)) => n_a = l.len().checked_sub(y).filter(|r| r % n == 0).map(|r| r / n),
        _ => {}
    }
    let (Some(n_a), Some(n_b)) = (n_a, n_b) else {
        return Err(schema("$", "cannot infer block widths; give \"n_A\" and \"n_B\""));
    };
    let d_a = row_count(a, "$.A")?.max(row_count(b, "$.B")?);
    let d_c = row_count(c, "$.C")?.max(row_count(d, "$.D")?);
    let block = |v: &Value, path: &str, rows: usize, cols: usize| -> Result<IntMatrix> {
        let m = matrix_from_json(v, path, Some(cols))?;
        if m.rows() == 0 && rows > 0 && cols == 0 {
            return Ok(IntMatrix::zeros(rows, 0));
        }
        if m.rows() != rows || m.cols() != cols {
            return Err(schema(
                path,
                &format!("expected a {rows}x{cols} block, found {}x{}", m.rows(), m.cols()),
            ));
        }
        Ok(m)
    };
    let a = block(a, "$.A", d_a, n_a)?;
    let b = block(b, "$.B", d_a, n_b)?;
    let c = block(c, "$.C", d_c, n_b)?;
    let d = block(d, "$.D", d_c, n_a)?;
    let objective = objective_from_json(get("objective")?, "$.objective")?;
    FourBlockInstance::new(a, b, c, d, n, l, u, rhs, objective).map_err(|e| schema("$", &e.to_string()))
}

pub fn smcf_spec_to_json(spec: &SmcfSpec) -> Value {
    json!({
        "nodes": spec.nodes,
        "arcs": spec.arcs.iter().map(|(p, q)| json!([p, q])).collect::<Vec<_>>(),
        "demands": spec.demands.iter().map(|d| vector_to_json(d)).collect::<Vec<_>>(),
        "capacities": spec.capacities.iter().map(|c| vector_to_json(c)).collect::<Vec<_>>(),
        "flow_costs": rationals_to_json(&spec.flow_costs),
        "penalty_slopes": rationals_to_json(&spec.penalty_slopes),
        "scenario_weights": spec.scenario_weights.as_ref().map(|w| rationals_to_json(w)),
    })
}

pub fn smcf_spec_from_json(v: &Value) -> Result<SmcfSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema("$", "expected an SMCF spec object"))?;
    let get = |k: &str| field(obj, k, "$");
    let nodes = usize_from_json(get("nodes")?, "$.nodes")?;
    let arcs = array(get("arcs")?, "$.arcs")?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = format!("$.arcs[{i}]");
            match a.as_array().map(|x| x.as_slice()) {
                Some([s, t]) => Ok((usize_from_json(s, &p)?, usize_from_json(t, &p)?)),
                _ => Err(schema(&p, "expected [tail, head]")),
            }
        })
        .collect::<Result<_>>()?;
    let vectors = |k: &str| -> Result<Vec<IntVector>> {
        array(get(k)?, &format!("$.{k}"))?
            .iter()
            .enumerate()
            .map(|(i, x)| vector_from_json(x, &format!("$.{k}[{i}]")))
            .collect()
    };
    let scenario_weights = match obj.get("scenario_weights") {
        None | Some(Value::Null) => None,
        Some(w) => Some(rationals_from_json(w, "$.scenario_weights")?),
    };
    Ok(SmcfSpec {
        nodes,
        arcs,
        demands: vectors("demands")?,
        capacities: vectors("capacities")?,
        flow_costs: rationals_from_json(get("flow_costs")?, "$.flow_costs")?,
        penalty_slopes: rationals_from_json(get("penalty_slopes")?, "$.penalty_slopes")?,
        scenario_weights,
    })
}

pub fn graver_to_json(g: &GraverBasis) -> Value {
    json!({
        "matrix": matrix_to_json(g.matrix()),
        "elements": g.elements().iter().map(|v| vector_to_json(v)).collect::<Vec<_>>(),
        "count": g.len(),
        "max_l1": int_to_json(g.max_l1()),
        "max_linf": int_to_json(g.max_linf()),
    })
}

pub fn bound_report_to_json(r: &BoundReport) -> Value {
    let inputs: Map<String, Value> = r.inputs.iter().map(|(k, v)| (k.clone(), int_to_json(v))).collect();
    json!({"bound_name": r.bound_name, "value": int_to_json(&r.value), "inputs": inputs})
}

pub fn outcome_to_json(out: &SolveOutcome) -> Value {
    let mut obj = Map::new();
    let status = match &out.status {
        SolveStatus::Optimal { z, value } => {
            obj.insert("z".into(), vector_to_json(z));
            obj.insert("value".into(), rational_to_json(value));
            "optimal"
        }
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
    };
    obj.insert("status".into(), Value::from(status));
    obj.insert("trail_steps".into(), Value::from(out.trail.len()));
    if let Some(bx) = &out.restricted_box {
        obj.insert(
            "restricted_box".into(),
            json!({"l": vector_to_json(&bx.l), "u": vector_to_json(&bx.u)}),
        );
    }
    if let Some(p) = &out.proximity {
        obj.insert(
            "continuous".into(),
            json!({"point": rationals_to_json(&p.continuous_point), "value": rational_to_json(&p.continuous_value)}),
        );
        obj.insert("ell".into(), p.ell.as_ref().map(int_to_json).unwrap_or(Value::Null));
        obj.insert("ell_source".into(), Value::from(format!("{:?}", p.ell_source)));
    }
    Value::Object(obj)
}

/// Compact output with sorted keys, or indented output.
pub fn render(v: &Value, canonical: bool) -> String {
    if canonical {
        v.to_string()
    } else {
        serde_json::to_string_pretty(v).expect("JSON values always serialize")
    }
}
