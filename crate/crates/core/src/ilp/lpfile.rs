//! Text LP-format export of an [`Ilp01`] and a parser for the emitted
//! subset, so exported programs can be cross-checked against external
//! solvers and round-tripped in tests.
//!
//! Coefficients are printed with Rust's shortest-round-trip float formatting,
//! so parsing recovers them exactly; variable names are sanitized to the
//! identifier charset and may therefore differ from the originals.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Ilp01, Sense};

#[derive(Debug, thiserror::Error)]
pub enum LpFormatError {
    #[error("lp export: {0}")]
    Export(String),
    #[error("lp parse: {0}")]
    Parse(String),
    #[error("lp write: {0}")]
    Io(#[from] std::io::Error),
}

const MAX_LINE: usize = 200;

fn sanitize_names(names: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(names.len());
    let mut used: HashMap<String, usize> = HashMap::new();
    for (j, name) in names.iter().enumerate() {
        let mut s: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
            s.insert(0, 'v');
        }
        if used.contains_key(&s) {
            s = format!("{s}_{j}");
        }
        used.insert(s.clone(), j);
        out.push(s);
    }
    out
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    let mut line_len = out.len() - out.rfind('\n').map_or(0, |i| i + 1);
    for (k, &(j, a)) in terms.iter().enumerate() {
        let piece = if k == 0 {
            if a < 0.0 {
                format!("- {} {}", -a, names[j])
            } else {
                format!("{} {}", a, names[j])
            }
        } else if a < 0.0 {
            format!(" - {} {}", -a, names[j])
        } else {
            format!(" + {} {}", a, names[j])
        };
        if line_len + piece.len() > MAX_LINE {
            out.push('\n');
            out.push(' ');
            line_len = 1;
        }
        out.push_str(&piece);
        line_len += piece.len();
    }
}

/// Renders `p` in LP format: objective, subject-to rows, binaries section.
pub fn write_lp_string(p: &Ilp01) -> Result<String, LpFormatError> {
    if p.num_vars() == 0 {
        return Err(LpFormatError::Export(
            "program has no variables".to_string(),
        ));
    }
    let names = sanitize_names(p.var_names());
    let mut out = String::new();
    out.push_str("Maximize\n obj: ");
    let obj_terms: Vec<(usize, f64)> = p
        .objective()
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();
    if obj_terms.is_empty() {
        // An expression is mandatory; a zero term is the conventional filler.
        push_terms(&mut out, &[(0, 0.0)], &names);
    } else {
        push_terms(&mut out, &obj_terms, &names);
    }
    out.push_str("\nSubject To\n");
    for (i, c) in p.constraints().iter().enumerate() {
        let _ = write!(out, " c{i}: ");
        if c.terms.is_empty() {
            push_terms(&mut out, &[(0, 0.0)], &names);
        } else {
            push_terms(&mut out, &c.terms, &names);
        }
        let _ = write!(out, " {} {}\n", c.sense.symbol(), c.rhs);
    }
    out.push_str("Binaries\n");
    let mut line_len = 0;
    for name in &names {
        if line_len + name.len() + 1 > MAX_LINE {
            out.push('\n');
            line_len = 0;
        }
        out.push(' ');
        out.push_str(name);
        line_len += name.len() + 1;
    }
    out.push_str("\nEnd\n");
    Ok(out)
}

/// Writes the LP rendering of `p` to `w`.
pub fn write_lp(p: &Ilp01, w: &mut impl std::io::Write) -> Result<(), LpFormatError> {
    let s = write_lp_string(p)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn is_section(tok: &str) -> bool {
    matches!(
        tok.to_ascii_lowercase().as_str(),
        "maximize" | "maximise" | "max" | "minimize" | "minimise" | "min" | "subject" | "st"
            | "s.t." | "such" | "bounds" | "bound" | "binaries" | "binary" | "bin" | "general"
            | "generals" | "gen" | "end"
    )
}

struct Tokens<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let toks = text
            .lines()
            .map(|l| l.split('\\').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace())
            .collect();
        Self { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.peek();
        self.pos += 1;
        t
    }
}

/// Parses LP text of the subset emitted by [`write_lp_string`]: a maximize
/// objective, subject-to rows with `<=`, `>=` or `=`, an optional bounds
/// section (ignored) and a binaries section that must name every variable.
pub fn parse_lp(text: &str) -> Result<Ilp01, LpFormatError> {
    let err = |m: &str| LpFormatError::Parse(m.to_string());
    let mut t = Tokens::new(text);

    match t.next().map(str::to_ascii_lowercase).as_deref() {
        Some("maximize" | "maximise" | "max") => {}
        Some(other) => {
            return Err(LpFormatError::Parse(format!(
                "expected a maximize section, found {other:?}"
            )))
        }
        None => return Err(err("empty file")),
    }

    // (name, coefficient) term lists; resolved to indices once the binaries
    // section fixes the variable order.
    let parse_expr = |t: &mut Tokens| -> Result<Vec<(String, f64)>, LpFormatError> {
        let mut terms = Vec::new();
        loop {
            let Some(tok) = t.peek() else { break };
            if is_section(tok) || tok == "<=" || tok == ">=" || tok == "=" || tok == "<" || tok == ">" {
                break;
            }
            t.next();
            if tok.ends_with(':') {
                continue; // row label
            }
            let (sign, tok) = match tok {
                "+" => (1.0, t.next().ok_or_else(|| err("dangling sign"))?),
                "-" => (-1.0, t.next().ok_or_else(|| err("dangling sign"))?),
                _ => (1.0, tok),
            };
            if let Ok(num) = tok.parse::<f64>() {
                let name = t.next().ok_or_else(|| err("coefficient without variable"))?;
                terms.push((name.to_string(), sign * num));
            } else {
                terms.push((tok.to_string(), sign));
            }
        }
        Ok(terms)
    };

    let objective = parse_expr(&mut t)?;

    match t.next().map(str::to_ascii_lowercase).as_deref() {
        Some("subject") => {
            let to = t.next().map(str::to_ascii_lowercase);
            if to.as_deref() != Some("to") {
                return Err(err("expected `subject to`"));
            }
        }
        Some("st" | "s.t." | "such") => {}
        _ => return Err(err("expected a subject-to section")),
    }

    let mut rows: Vec<(Vec<(String, f64)>, Sense, f64)> = Vec::new();
    loop {
        match t.peek() {
            None => return Err(err("unterminated constraint section")),
            Some(tok) if is_section(tok) => break,
            Some(_) => {}
        }
        let terms = parse_expr(&mut t)?;
        let sense = match t.next() {
            Some("<=" | "<") => Sense::Le,
            Some(">=" | ">") => Sense::Ge,
            Some("=") => Sense::Eq,
            other => {
                return Err(LpFormatError::Parse(format!(
                    "expected a comparison operator, found {other:?}"
                )))
            }
        };
        let rhs_tok = t.next().ok_or_else(|| err("missing right-hand side"))?;
        let rhs: f64 = rhs_tok
            .parse()
            .map_err(|_| LpFormatError::Parse(format!("bad right-hand side {rhs_tok:?}")))?;
        rows.push((terms, sense, rhs));
    }

    let mut binaries: Vec<String> = Vec::new();
    loop {
        match t.next().map(|s| (s, s.to_ascii_lowercase())) {
            None => return Err(err("missing end marker")),
            Some((_, low)) if low == "end" => break,
            Some((_, low)) if low == "bounds" || low == "bound" => {
                while t.peek().is_some_and(|tok| !is_section(tok)) {
                    t.next();
                }
            }
            Some((_, low)) if low == "binaries" || low == "binary" || low == "bin" => {
                while let Some(tok) = t.peek() {
                    if is_section(tok) {
                        break;
                    }
                    binaries.push(tok.to_string());
                    t.next();
                }
            }
            Some((tok, _)) => {
                return Err(LpFormatError::Parse(format!("unexpected token {tok:?}")))
            }
        }
    }

    let index: HashMap<&str, usize> = binaries
        .iter()
        .enumerate()
        .map(|(j, n)| (n.as_str(), j))
        .collect();
    if index.len() != binaries.len() {
        return Err(err("duplicate variable in binaries section"));
    }
    let resolve = |terms: Vec<(String, f64)>| -> Result<Vec<(usize, f64)>, LpFormatError> {
        terms
            .into_iter()
            .map(|(n, a)| {
                index
                    .get(n.as_str())
                    .map(|&j| (j, a))
                    .ok_or_else(|| LpFormatError::Parse(format!("variable {n:?} is not binary")))
            })
            .collect()
    };

    let mut p = Ilp01::with_names(binaries.clone());
    for (j, a) in resolve(objective)? {
        p.set_objective(j, a);
    }
    for (terms, sense, rhs) in rows {
        let terms = resolve(terms)?;
        p.add_constraint(terms, sense, rhs);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_rows(p: &Ilp01) -> Vec<(Vec<f64>, Sense, f64)> {
        p.constraints()
            .iter()
            .map(|c| {
                let mut row = vec![0.0; p.num_vars()];
                for &(j, a) in &c.terms {
                    row[j] += a;
                }
                (row, c.sense, c.rhs)
            })
            .collect()
    }

    #[test]
    fn coefficients_round_trip() {
        let mut p = Ilp01::with_names(vec![
            "x_c1_b1_s1".into(),
            "y_c1_w1".into(),
            "z_c1_b1_s1".into(),
        ]);
        p.set_objective(0, 1.0 / 3.0);
        p.set_objective(1, -0.125);
        p.set_objective(2, 1e-7);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Eq, 1.0);
        p.add_constraint(vec![(2, 1.0), (0, -1.0)], Sense::Le, 0.0);
        p.add_constraint(vec![], Sense::Ge, 0.0);
        p.add_constraint(vec![(1, -2.5)], Sense::Ge, -2.0);

        let text = write_lp_string(&p).unwrap();
        let q = parse_lp(&text).unwrap();
        assert_eq!(q.num_vars(), p.num_vars());
        assert_eq!(q.objective(), p.objective());
        // Empty rows come back as an explicit zero term; compare densely.
        assert_eq!(dense_rows(&q), dense_rows(&p));
    }

    #[test]
    fn names_are_sanitized_and_kept_unique() {
        let mut p = Ilp01::with_names(vec!["a b".into(), "a_b".into(), "1st".into()]);
        p.set_objective(2, 1.0);
        let text = write_lp_string(&p).unwrap();
        let q = parse_lp(&text).unwrap();
        assert_eq!(q.num_vars(), 3);
        assert_eq!(q.objective()[2], 1.0);
        assert_eq!(q.var_names()[0], "a_b");
        assert_ne!(q.var_names()[1], "a_b");
        assert!(q.var_names()[2].starts_with('v'));
    }

    #[test]
    fn long_objectives_wrap_and_parse() {
        let n = 120;
        let mut p = Ilp01::new(n);
        for j in 0..n {
            p.set_objective(j, 1.0 + j as f64 / 7.0);
        }
        p.add_constraint((0..n).map(|j| (j, 1.0)).collect(), Sense::Le, 3.0);
        let text = write_lp_string(&p).unwrap();
        assert!(text.lines().all(|l| l.len() <= MAX_LINE + 40));
        let q = parse_lp(&text).unwrap();
        assert_eq!(q.objective(), p.objective());
    }

    #[test]
    fn rejects_minimize_and_garbage() {
        assert!(parse_lp("Minimize\n obj: x\nSubject To\nEnd\n").is_err());
        assert!(parse_lp("").is_err());
        assert!(parse_lp("Maximize\n obj: 1 x\nSubject To\n c0: 1 x <= \nEnd").is_err());
    }
}
