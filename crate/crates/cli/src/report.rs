//! Deterministic report formatting.
//!
//! Computed numbers are rounded to 12 significant digits and printed in their
//! shortest form; keys come out sorted because `serde_json::Map` is ordered.
//! The echoed problem keeps full precision so it parses back unchanged.

use alphaproj::projection::PythagoreanReport;
use alphaproj::{Certificate, ProblemSpec, ProjectionResult};
use serde_json::{json, Map, Value};

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        json!(round_sig(x))
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Decimal with 12 significant digits, for CSV cells.
pub fn csv_num(x: f64) -> String {
    match num(x) {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s,
        _ => unreachable!(),
    }
}

pub fn problem(problem: &ProblemSpec) -> Value {
    serde_json::to_value(problem.to_raw()).expect("problem serializes")
}

pub fn certificate(c: &Certificate, passes: bool) -> Value {
    json!({
        "theta": nums(&c.theta),
        "z": num(c.z),
        "fit_residual": num(c.fit_residual),
        "sign_violation": num(c.sign_violation),
        "support_equal": c.support_equal,
        "degenerate": c.degenerate,
        "passes": passes,
    })
}

pub fn result(r: &ProjectionResult) -> Value {
    json!({
        "p_star": nums(r.p_star.weights()),
        "support": r.p_star.support(),
        "theta": nums(&r.theta),
        "z": num(r.z),
        "divergence": num(r.divergence),
        "iterations": r.iterations,
        "solver": r.solver.name(),
        "converged": r.converged,
        "fallback": r.fallback,
    })
}

/// At most this many violating sample indices are listed.
const LISTED_VIOLATIONS: usize = 20;

pub fn verification(rep: &PythagoreanReport, seed: u64, violations: &[usize]) -> Value {
    json!({
        "samples": rep.samples.len(),
        "seed": seed,
        "min_gap": num(rep.min_gap()),
        "max_gap": num(rep.max_gap()),
        "violations": violations.len(),
        "violating_samples": &violations[..violations.len().min(LISTED_VIOLATIONS)],
        "passed": violations.is_empty(),
    })
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn object(entries: Vec<(&str, Value)>) -> Value {
    Value::Object(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}
