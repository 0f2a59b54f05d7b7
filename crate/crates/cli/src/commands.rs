use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use alphaproj::projection::{check_report, default_fit_tolerance, pythagorean_report};
use alphaproj::{
    family_support, grid_oracle_search, homogenize, kl_divergence, project as solve,
    pythagorean_gap, relative_alpha_entropy, renyi_entropy, sweep_alpha, validate_distribution,
    Alpha, Distribution, Error, LinearFamily, ProblemSpec, ProjectOptions, SolverChoice,
};
use serde_json::{json, Value};

use crate::input::{load_problem, parse_alphas, parse_vector};
use crate::report::{self, csv_num, num};
use crate::*;

fn io(e: std::io::Error) -> CliError {
    CliError::new(EXIT_FAILURE, e.to_string())
}

/// Maps library errors to exit codes.
fn classify(e: Error) -> CliError {
    let code = match &e {
        Error::Infeasible { .. } | Error::EmptyFamily => EXIT_INFEASIBLE,
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        Error::VerificationFailed { .. } => EXIT_VERIFICATION,
        Error::DimensionTooHigh(_) => EXIT_DIMENSION_TOO_HIGH,
        Error::NoFeasibleLatticePoint { .. } => EXIT_NO_LATTICE_POINT,
        _ => EXIT_PARSE,
    };
    CliError::new(code, e.to_string())
}

fn family_of(problem: &ProblemSpec) -> Result<LinearFamily, CliError> {
    problem.family().map_err(classify)
}

fn vector_6(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

pub fn divergence(
    file: &Path,
    p: Option<&str>,
    p_file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let problem = load_problem(file)?;
    let raw = match (p, p_file) {
        (Some(s), _) => parse_vector(s)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
            parse_vector(&text)?
        }
        (None, None) => return Err(CliError::new(EXIT_PARSE, "P is required (--p or --p-file)")),
    };
    if raw.len() != problem.n() {
        return Err(CliError::new(
            EXIT_DIMENSION,
            format!("P has {} entries but Q has {}", raw.len(), problem.n()),
        ));
    }
    let p = validate_distribution(&raw, alphaproj::distribution::DEFAULT_SUM_TOL)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("P: {e}")))?;
    let i = relative_alpha_entropy(&p, &problem.q, problem.alpha).map_err(classify)?;
    let kl = kl_divergence(&p, &problem.q).map_err(classify)?;
    writeln!(out, "I_alpha = {i:.6}").map_err(io)?;
    writeln!(out, "H_alpha = {:.6}", renyi_entropy(&p, problem.alpha)).map_err(io)?;
    writeln!(out, "KL = {kl:.6}").map_err(io)?;
    Ok(())
}

pub struct ProjectArgs {
    pub solver: Solver,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

pub fn project(file: &Path, args: &ProjectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    if args.samples == 0 {
        return Err(CliError::new(EXIT_PARSE, "--samples must be at least 1"));
    }
    let problem = load_problem(file)?;
    let family = family_of(&problem)?;
    let opts = ProjectOptions {
        solver: match args.solver {
            Solver::Auto => SolverChoice::Auto,
            Solver::Parametric => SolverChoice::Parametric,
            Solver::Descent => SolverChoice::Descent,
        },
        ..ProjectOptions::default()
    };
    let supp = family_support(&family).map_err(classify)?;
    let mut entries = vec![
        ("problem", report::problem(&problem)),
        ("family_support", json!(supp.indices)),
    ];
    let (status, failure) = match solve(&problem.q, &family, problem.alpha, &opts) {
        Ok(res) => {
            let rep = pythagorean_report(
                &res.p_star,
                &problem.q,
                &family,
                problem.alpha,
                args.samples,
                args.seed,
            )
            .map_err(classify)?;
            let violations = check_report(&rep, problem.alpha);
            entries.push(("result", report::result(&res)));
            if let Some(c) = &res.certificate {
                let passes = c.passes(
                    problem.alpha,
                    default_fit_tolerance(&problem.q, problem.alpha),
                );
                entries.push(("certificate", report::certificate(c, passes)));
            }
            entries.push((
                "verification",
                report::verification(&rep, args.seed, &violations),
            ));
            if violations.is_empty() {
                ("verified", None)
            } else {
                let msg = format!(
                    "verification failed on {} of {} samples",
                    violations.len(),
                    args.samples
                );
                (
                    "verification_failed",
                    Some(CliError::new(EXIT_VERIFICATION, msg)),
                )
            }
        }
        Err(Error::NoConvergence {
            iterations,
            residual,
            best,
        }) => {
            entries.push(("result", report::result(&best)));
            let msg =
                format!("no convergence after {iterations} iterations (residual {residual:e})");
            (
                "no_convergence",
                Some(CliError::new(EXIT_NO_CONVERGENCE, msg)),
            )
        }
        Err(e) => return Err(classify(e)),
    };
    entries.push(("status", json!(status)));
    if args.timing {
        entries.push(("wall_clock_ms", num(started.elapsed().as_secs_f64() * 1e3)));
    }
    let text = report::to_text(&report::object(entries));
    out.write_all(text.as_bytes()).map_err(io)?;
    if let Some(path) = &args.out {
        std::fs::write(path, &text)
            .map_err(|e| CliError::new(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    }
    match failure {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

pub fn oracle(
    file: &Path,
    step: f64,
    report_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let problem = load_problem(file)?;
    let family = family_of(&problem)?;
    let solver_value = match report_path {
        Some(path) => Some(read_report_divergence(path)?),
        None => None,
    };
    let res = grid_oracle_search(&problem.q, &family, problem.alpha, step).map_err(classify)?;
    writeln!(out, "argmin = {}", vector_6(res.point.weights())).map_err(io)?;
    writeln!(out, "I_alpha = {:.6}", res.value).map_err(io)?;
    writeln!(
        out,
        "lattice points = {} (feasible {}), step = {step}",
        res.evaluated, res.feasible
    )
    .map_err(io)?;
    if let Some(v) = solver_value {
        writeln!(out, "solver I_alpha = {v:.6}").map_err(io)?;
        writeln!(out, "oracle - solver = {:.3e}", res.value - v).map_err(io)?;
    }
    Ok(())
}

fn read_report_divergence(path: &Path) -> Result<f64, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    v.pointer("/result/divergence")
        .and_then(Value::as_f64)
        .ok_or_else(|| {
            CliError::new(
                EXIT_PARSE,
                format!("{}: no result.divergence", path.display()),
            )
        })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep(
    file: &Path,
    alphas: &str,
    parallel: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let problem = load_problem(file)?;
    let family = family_of(&problem)?;
    let alphas = parse_alphas(alphas)?;
    let rows = sweep_alpha(
        &problem.q,
        &family,
        &alphas,
        &ProjectOptions::default(),
        parallel,
    );
    let k = family.k();
    let mut header = vec![
        "alpha".to_string(),
        "divergence_at_projection".into(),
        "support_size".into(),
    ];
    header.extend((1..=k).map(|i| format!("theta_{i}")));
    header.extend(["z".to_string(), "status".into()]);
    let mut text = header.join(",");
    text.push('\n');
    let mut ok = 0;
    for row in &rows {
        let mut cells = vec![csv_num(row.alpha)];
        match &row.outcome {
            Ok(p) => {
                ok += 1;
                cells.push(csv_num(p.divergence));
                cells.push(p.support_size.to_string());
                cells.extend(p.theta.iter().map(|&t| csv_num(t)));
                cells.push(csv_num(p.z));
                cells.push("ok".into());
            }
            Err(msg) => {
                cells.extend(std::iter::repeat_n(String::new(), k + 3));
                cells.push(csv_field(&format!("error: {msg}")));
            }
        }
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(io)?;
    if ok == 0 {
        return Err(CliError::new(EXIT_FAILURE, "every row failed"));
    }
    Ok(())
}

/// Tolerance on the quoted four-decimal Pythagorean values.
const QUOTED_TOL: f64 = 5e-5;

pub fn counterexample(out: &mut dyn Write) -> Result<(), CliError> {
    let a = 2.0;
    let alpha = Alpha::new(a).expect("valid order");
    let q = Distribution::uniform(4);
    let family = homogenize(4, &[(vec![8.0, 4.0, 2.0, 1.0], 7.0)]).map_err(classify)?;
    let f = family.rows()[0].clone();
    let res = solve(&q, &family, alpha, &ProjectOptions::default()).map_err(classify)?;
    let cert = res
        .certificate
        .clone()
        .ok_or_else(|| CliError::new(EXIT_REPRODUCTION, "no certificate for the projection"))?;
    let (theta, z) = (cert.theta[0], cert.z);
    let ps = res.p_star.weights();
    let bracket = |x: usize| q.weights()[x] + (1.0 - a) * theta * f[x];
    let zp = |x: usize| z * ps[x];

    let mut diffs = Vec::new();
    let mut expect = |what: &str, got: f64, want: f64, tol: f64| {
        if !((got - want).abs() <= tol) {
            diffs.push(format!("{what}: got {got}, expected {want} within {tol:e}"));
        }
    };
    for (x, want) in [0.75, 0.25, 0.0, 0.0].into_iter().enumerate() {
        expect(&format!("P*({})", x + 1), ps[x], want, 1e-6);
    }
    expect("Z", z, 0.4, 1e-8);
    expect("theta", theta, -0.05, 1e-8);
    for x in 0..2 {
        expect(
            &format!("Z P*({}) - bracket", x + 1),
            zp(x),
            bracket(x),
            1e-9,
        );
    }
    expect("bracket(3)", bracket(2), 0.0, 1e-9);
    expect("Z P*(4)", zp(3), 0.0, 0.0);
    let p = Distribution::new(&[0.8227, 0.0625, 0.0536, 0.0612]).expect("valid point");
    let lhs = relative_alpha_entropy(&p, &q, alpha)
        .map_err(classify)?
        .value();
    let gap = pythagorean_gap(&p, &res.p_star, &q, alpha).map_err(classify)?;
    let rhs = lhs - gap;
    expect("LHS", lhs, 1.0114, QUOTED_TOL);
    expect("RHS", rhs, 0.9871, QUOTED_TOL);
    let supp_l = family_support(&family).map_err(classify)?.indices;
    let supp_p = res.p_star.support().to_vec();
    if !bracket(0).is_sign_positive() || !bracket(1).is_sign_positive() || !(bracket(3) < 0.0) {
        diffs.push("sign chain does not hold".into());
    }
    if supp_p != [0, 1] || supp_l != [0, 1, 2, 3] {
        diffs.push(format!("supports: Supp(P*)={supp_p:?}, Supp(L)={supp_l:?}"));
    }

    let set = |s: &[usize]| {
        let items: Vec<String> = s.iter().map(|x| (x + 1).to_string()).collect();
        format!("{{{}}}", items.join(","))
    };
    let lines = [
        "alpha = 2, Q = uniform(4), 8p1+4p2+2p3+p4 = 7, f1 = (1, -3, -5, -6)".to_string(),
        format!("P* = {}", vector_6(ps)),
        format!("Z={z:.6} theta={theta:.6}"),
        format!(
            "0 < Z P*(x) = Q(x) + (1-alpha) theta f1(x), x=1,2: {:.6} = {:.6}, {:.6} = {:.6}",
            zp(0),
            bracket(0),
            zp(1),
            bracket(1)
        ),
        format!(
            "0 = Z P*(3) = Q(3) + (1-alpha) theta f1(3) = {:.6}",
            bracket(2).abs()
        ),
        format!(
            "0 = Z P*(4) > Q(4) + (1-alpha) theta f1(4) = {:.6}",
            bracket(3)
        ),
        format!("LHS={lhs:.4} RHS={rhs:.4} gap={gap:.4}"),
        format!("Supp(P*)={} ⊊ Supp(L)={}", set(&supp_p), set(&supp_l)),
    ];
    for line in &lines {
        writeln!(out, "{line}").map_err(io)?;
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_REPRODUCTION,
            format!("reproduction failed:\n  {}", diffs.join("\n  ")),
        ))
    }
}
