use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ConSense, ObjSense, Problem, QuadConstraint, Term, VarKind};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    let v: f64 = tok.parse().map_err(|_| err(line, format!("bad {what} '{tok}'")))?;
    if v.is_nan() {
        return Err(err(line, format!("{what} is NaN")));
    }
    Ok(v)
}

fn index(tok: Option<&str>, line: usize, n: Option<usize>) -> Result<usize> {
    let n = n.ok_or_else(|| err(line, "NVARS must come first"))?;
    let tok = tok.ok_or_else(|| err(line, "missing variable index"))?;
    let k: usize = tok.parse().map_err(|_| err(line, format!("bad variable index '{tok}'")))?;
    if k >= n {
        return Err(err(line, format!("variable index {k} out of range (NVARS {n})")));
    }
    Ok(k)
}

#[derive(Default)]
struct PendingRow {
    terms: Vec<Term>,
    linear: Vec<(usize, f64)>,
    sense: Option<(ConSense, f64)>,
    line: usize,
}

/// Reads the line-oriented canonical format. `#` starts a comment.
///
/// ```text
/// NAME tiny
/// SENSE MAX
/// NVARS 2
/// VAR 0 B 0 1
/// VAR 1 C -inf +inf
/// OBJ QUAD 0 1 3
/// OBJ LIN 0 1
/// CON c1 LIN 1 1
/// CON c1 SENSE LE 4
/// ```
pub fn parse_canonical(text: &str) -> Result<Problem> {
    let mut name = String::from("unnamed");
    let mut sense = ObjSense::Minimize;
    let mut n: Option<usize> = None;
    let mut declared: Vec<bool> = Vec::new();
    let mut problem = Problem::new("", 0);
    let mut obj_terms = Vec::new();
    let mut rows: Vec<(String, PendingRow)> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let keyword = toks.next().unwrap_or_default();
        match keyword {
            "NAME" => {
                name = content["NAME".len()..].trim().to_string();
                continue;
            }
            "SENSE" => {
                sense = match toks.next() {
                    Some("MIN") => ObjSense::Minimize,
                    Some("MAX") => ObjSense::Maximize,
                    other => return Err(err(line, format!("bad SENSE {other:?}"))),
                };
            }
            "NVARS" => {
                if n.is_some() {
                    return Err(err(line, "NVARS given twice"));
                }
                let count = number(toks.next(), line, "NVARS")?;
                if count < 0.0 || count.fract() != 0.0 {
                    return Err(err(line, "NVARS must be a nonnegative integer"));
                }
                let count = count as usize;
                n = Some(count);
                problem = Problem::new("", count);
                declared = vec![false; count];
            }
            "VAR" => {
                let k = index(toks.next(), line, n)?;
                if declared[k] {
                    return Err(err(line, format!("variable {k} declared twice")));
                }
                let kind = match toks.next() {
                    Some("C") => VarKind::Continuous,
                    Some("I") => VarKind::Integer,
                    Some("B") => VarKind::Binary,
                    other => return Err(err(line, format!("bad variable kind {other:?}"))),
                };
                let lb = number(toks.next(), line, "lower bound")?;
                let ub = number(toks.next(), line, "upper bound")?;
                if lb > ub {
                    return Err(err(line, format!("lower bound {lb} above upper bound {ub}")));
                }
                problem.set_var(k, kind, lb, ub);
                declared[k] = true;
            }
            "OBJ" => match toks.next() {
                Some("QUAD") => {
                    let i = index(toks.next(), line, n)?;
                    let j = index(toks.next(), line, n)?;
                    obj_terms.push(Term::new(i, j, number(toks.next(), line, "coefficient")?));
                }
                Some("LIN") => {
                    let i = index(toks.next(), line, n)?;
                    problem.obj_linear[i] += number(toks.next(), line, "coefficient")?;
                }
                Some("CONST") => problem.obj_constant += number(toks.next(), line, "constant")?,
                other => return Err(err(line, format!("bad OBJ entry {other:?}"))),
            },
            "CON" => {
                let id = toks.next().ok_or_else(|| err(line, "missing constraint id"))?.to_string();
                let slot = *row_index.entry(id.clone()).or_insert_with(|| {
                    rows.push((id.clone(), PendingRow { line, ..Default::default() }));
                    rows.len() - 1
                });
                let row = &mut rows[slot].1;
                match toks.next() {
                    Some("QUAD") => {
                        let i = index(toks.next(), line, n)?;
                        let j = index(toks.next(), line, n)?;
                        row.terms.push(Term::new(i, j, number(toks.next(), line, "coefficient")?));
                    }
                    Some("LIN") => {
                        let i = index(toks.next(), line, n)?;
                        row.linear.push((i, number(toks.next(), line, "coefficient")?));
                    }
                    Some("SENSE") => {
                        if row.sense.is_some() {
                            return Err(err(line, format!("constraint {id} has two SENSE lines")));
                        }
                        let s = match toks.next() {
                            Some("LE") => ConSense::Le,
                            Some("GE") => ConSense::Ge,
                            Some("EQ") => ConSense::Eq,
                            other => return Err(err(line, format!("bad constraint sense {other:?}"))),
                        };
                        let rhs = number(toks.next(), line, "right-hand side")?;
                        if !rhs.is_finite() {
                            return Err(err(line, "right-hand side must be finite"));
                        }
                        row.sense = Some((s, rhs));
                    }
                    other => return Err(err(line, format!("bad CON entry {other:?}"))),
                }
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected trailing token '{extra}'")));
        }
    }

    let n = n.ok_or_else(|| err(text.lines().count().max(1), "missing NVARS"))?;
    if let Some(k) = declared.iter().position(|d| !d) {
        return Err(err(text.lines().count().max(1), format!("variable {k} of {n} never declared")));
    }
    problem.name = name;
    problem.set_obj_terms(obj_terms);
    if sense == ObjSense::Maximize {
        for t in &mut problem.obj_terms {
            t.coef = -t.coef;
        }
        for d in &mut problem.obj_linear {
            *d = -*d;
        }
        problem.obj_constant = -problem.obj_constant;
    }
    problem.sense = sense;
    for (id, row) in rows {
        let (s, rhs) = row
            .sense
            .ok_or_else(|| err(row.line, format!("constraint {id} has no SENSE line")))?;
        problem.add_constraint(QuadConstraint::new(id, row.terms, row.linear, -rhs, s));
    }
    Ok(problem)
}

fn bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

/// Writes a problem in the canonical format, objective in the original
/// sense. Floats use the shortest round-tripping representation, so
/// `parse_canonical(&write_canonical(p))` reproduces `p`.
pub fn write_canonical(problem: &Problem) -> String {
    let sign = match problem.sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };
    let mut out = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(out, "NAME {}", problem.name);
    let _ = writeln!(
        out,
        "SENSE {}",
        if problem.sense == ObjSense::Maximize { "MAX" } else { "MIN" }
    );
    let _ = writeln!(out, "NVARS {}", problem.n());
    for k in 0..problem.n() {
        let kind = match problem.kinds[k] {
            VarKind::Continuous => "C",
            VarKind::Integer => "I",
            VarKind::Binary => "B",
        };
        let _ = writeln!(out, "VAR {k} {kind} {} {}", bound(problem.lb[k]), bound(problem.ub[k]));
    }
    for t in &problem.obj_terms {
        let _ = writeln!(out, "OBJ QUAD {} {} {:?}", t.i, t.j, sign * t.coef);
    }
    for (k, d) in problem.obj_linear.iter().enumerate() {
        if *d != 0.0 {
            let _ = writeln!(out, "OBJ LIN {k} {:?}", sign * d);
        }
    }
    if problem.obj_constant != 0.0 {
        let _ = writeln!(out, "OBJ CONST {:?}", sign * problem.obj_constant);
    }
    for (r, c) in problem.constraints.iter().enumerate() {
        // Ids must be single tokens and unique.
        let id = if c.name.is_empty() || c.name.contains(char::is_whitespace) || c.name.contains('#') {
            format!("r{r}")
        } else {
            c.name.clone()
        };
        for t in &c.terms {
            let _ = writeln!(out, "CON {id} QUAD {} {} {:?}", t.i, t.j, t.coef);
        }
        for &(k, a) in &c.linear {
            let _ = writeln!(out, "CON {id} LIN {k} {a:?}");
        }
        let s = match c.sense {
            ConSense::Le => "LE",
            ConSense::Ge => "GE",
            ConSense::Eq => "EQ",
        };
        let _ = writeln!(out, "CON {id} SENSE {s} {:?}", -c.constant + 0.0);
    }
    out
}
