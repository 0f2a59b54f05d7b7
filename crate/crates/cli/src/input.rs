//! Problem files and vector arguments.

use std::path::Path;

use alphaproj::{Error, ProblemSpec, RawProblem};

use crate::{CliError, EXIT_PARSE};

/// Reads a problem file. JSON is detected by a `.json` extension or a leading
/// `{`; everything else is parsed as TOML.
pub fn load_problem(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    parse_problem(&text, json)
        .map_err(|e| CliError::new(e.code, format!("{}: {}", path.display(), e.message)))
}

pub fn parse_problem(text: &str, json: bool) -> Result<ProblemSpec, CliError> {
    let raw: RawProblem = if json {
        serde_json::from_str(text).map_err(|e| CliError::new(EXIT_PARSE, e.to_string()))?
    } else {
        toml::from_str(text)
            .map_err(|e| CliError::new(EXIT_PARSE, e.to_string().trim_end().to_string()))?
    };
    check_fields(&raw)?;
    ProblemSpec::from_raw(raw).map_err(|e| CliError::new(EXIT_PARSE, e.to_string()))
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::new(EXIT_PARSE, format!("field `{field}`: {msg}"))
}

/// Field-addressed checks, so the message names the offending entry.
fn check_fields(raw: &RawProblem) -> Result<(), CliError> {
    if !(raw.alpha.is_finite() && raw.alpha > 0.0) {
        return Err(field_error("alpha", Error::InvalidAlpha(raw.alpha)));
    }
    alphaproj::validate_distribution(&raw.q, alphaproj::distribution::DEFAULT_SUM_TOL)
        .map_err(|e| field_error("q", e))?;
    let n = raw.q.len();
    for (i, c) in raw.constraints.iter().enumerate() {
        if c.f.len() != n {
            return Err(field_error(
                &format!("constraints[{i}].f"),
                format!("expected {n} entries, found {}", c.f.len()),
            ));
        }
    }
    if let Some(labels) = &raw.labels {
        if labels.len() != n {
            return Err(field_error(
                "labels",
                format!("expected {n} entries, found {}", labels.len()),
            ));
        }
    }
    Ok(())
}

/// Parses `0.1,0.2 0.7`, optionally wrapped in `()` or `[]`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, CliError> {
    let body = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    body.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::new(EXIT_PARSE, format!("not a number: `{t}`")))
        })
        .collect()
}

/// Either `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_alphas(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 1 {
        return parse_vector(s);
    }
    if parts.len() != 3 {
        return Err(CliError::new(
            EXIT_PARSE,
            format!("range must be start:step:stop, got `{s}`"),
        ));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::new(EXIT_PARSE, format!("not a number: `{t}`")))
    };
    let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) || stop < start {
        return Err(CliError::new(
            EXIT_PARSE,
            format!("empty or invalid range `{s}`"),
        ));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| crate::report::round_sig(start + i as f64 * step))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t =
            "alpha = 2\nq = [0.25, 0.25, 0.25, 0.25]\n[[constraints]]\nf = [8, 4, 2, 1]\nrhs = 7\n";
        let j = r#"{"alpha": 2, "q": [0.25, 0.25, 0.25, 0.25], "constraints": [{"f": [8, 4, 2, 1], "rhs": 7}]}"#;
        let a = parse_problem(t, false).unwrap();
        let b = parse_problem(j, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.family().unwrap().rows(), &[vec![1.0, -3.0, -5.0, -6.0]]);
    }

    #[test]
    fn errors_name_the_field() {
        let t = "alpha = 2\nq = [0.5, 0.5]\n[[constraints]]\nf = [1, 2, 3]\nrhs = 0\n";
        let e = parse_problem(t, false).unwrap_err();
        assert!(e.message.contains("constraints[0].f"), "{}", e.message);
        let e = parse_problem("alpha = 2\nq = [0.5, 0.6]\n", false).unwrap_err();
        assert!(e.message.contains("`q`"), "{}", e.message);
        let e = parse_problem("alpha = [\n", false).unwrap_err();
        assert!(e.message.contains("line"), "{}", e.message);
    }

    #[test]
    fn vectors_and_ranges() {
        assert_eq!(parse_vector("(0.5, 0.5)").unwrap(), vec![0.5, 0.5]);
        assert_eq!(
            parse_alphas("0.5:0.25:2.0").unwrap(),
            vec![0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
        );
        assert_eq!(parse_alphas("0.1:0.1:0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_alphas("2,-1").unwrap(), vec![2.0, -1.0]);
        assert!(parse_alphas("1:0:2").is_err());
    }
}
