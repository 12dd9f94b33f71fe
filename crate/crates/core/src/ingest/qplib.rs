//! Reader for the QPLIB `.qplib` text format, restricted to instances whose
//! data are quadratic/linear objective and constraint coefficients, bounds
//! and variable types.
//!
//! QPLIB stores quadratic parts as `1/2 x^T Q x` with the lower triangle
//! listed, so an off-diagonal entry `v` becomes the term `v x_i x_j` and a
//! diagonal entry becomes `(v / 2) x_i^2`.

use crate::error::{Error, Result};
use crate::model::{ConSense, ObjSense, Problem, QuadConstraint, Term, VarKind};

struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<_> = text
            .lines()
            .enumerate()
            .filter_map(|(k, raw)| {
                let content = raw.split(['#', '!']).next().unwrap_or("").trim();
                (!content.is_empty()).then(|| (k + 1, content.split_whitespace().collect()))
            })
            .collect();
        let last_line = text.lines().count().max(1);
        Lines { lines, pos: 0, last_line }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let item = self.lines.get(self.pos).cloned().ok_or_else(|| Error::Parse {
            line: self.last_line,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn first_token(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let (line, toks) = self.next(what)?;
        Ok((line, toks[0]))
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        let (line, tok) = self.first_token(what)?;
        parse_f64(tok, line, what)
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.first_token(what)?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad {what} '{tok}'"),
        })
    }

    /// A data line with `arity` leading fields: `arity - 1` one-based
    /// indices bounded by `limits` followed by a value.
    fn entry(&mut self, what: &str, limits: &[usize]) -> Result<(Vec<usize>, f64)> {
        let (line, toks) = self.next(what)?;
        if toks.len() < limits.len() + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("{what}: expected {} fields", limits.len() + 1),
            });
        }
        let mut idx = Vec::with_capacity(limits.len());
        for (tok, &limit) in toks.iter().zip(limits) {
            let k: usize = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("{what}: bad index '{tok}'"),
            })?;
            if k == 0 || k > limit {
                return Err(Error::Parse {
                    line,
                    msg: format!("{what}: index {k} outside 1..={limit}"),
                });
            }
            idx.push(k - 1);
        }
        Ok((idx, parse_f64(toks[limits.len()], line, what)?))
    }

    /// Default value followed by a count of sparse overrides.
    fn defaulted(&mut self, what: &str, len: usize) -> Result<Vec<f64>> {
        let default = self.float(what)?;
        let mut values = vec![default; len];
        let count = self.count(what)?;
        for _ in 0..count {
            let (idx, v) = self.entry(what, &[len])?;
            values[idx[0]] = v;
        }
        Ok(values)
    }
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => Err(Error::Parse {
            line,
            msg: format!("{what}: bad number '{tok}'"),
        }),
    }
}

fn half_q_term(i: usize, j: usize, v: f64) -> Term {
    if i == j {
        Term::new(i, i, v / 2.0)
    } else {
        Term::new(i, j, v)
    }
}

/// Parses a QPLIB instance. Problem-type codes outside the supported
/// subset are rejected with [`Error::Unsupported`].
pub fn parse_qplib(text: &str) -> Result<Problem> {
    let mut lines = Lines::new(text);
    let (_, name_toks) = lines.next("instance name")?;
    let name = name_toks.join(" ");

    let (type_line, code) = lines.first_token("problem type")?;
    let code: Vec<char> = code.to_ascii_uppercase().chars().collect();
    if code.len() != 3 {
        return Err(Error::Parse {
            line: type_line,
            msg: format!("problem type must have three letters, got {}", code.iter().collect::<String>()),
        });
    }
    let (obj_code, var_code, con_code) = (code[0], code[1], code[2]);
    if !matches!(obj_code, 'L' | 'D' | 'C' | 'Q') {
        return Err(Error::Unsupported(format!("objective type '{obj_code}'")));
    }
    if !matches!(var_code, 'C' | 'B' | 'M' | 'I' | 'G') {
        return Err(Error::Unsupported(format!("variable type '{var_code}'")));
    }
    if !matches!(con_code, 'N' | 'B' | 'L' | 'D' | 'C' | 'Q') {
        return Err(Error::Unsupported(format!("constraint type '{con_code}'")));
    }

    let (sense_line, sense_tok) = lines.first_token("objective sense")?;
    let sense = match sense_tok.to_ascii_lowercase().as_str() {
        "minimize" | "min" => ObjSense::Minimize,
        "maximize" | "max" => ObjSense::Maximize,
        other => {
            return Err(Error::Parse {
                line: sense_line,
                msg: format!("bad objective sense '{other}'"),
            })
        }
    };
    let n = lines.count("number of variables")?;
    let m = if matches!(con_code, 'N' | 'B') {
        0
    } else {
        lines.count("number of constraints")?
    };

    let mut problem = Problem::new(name, n);
    let mut obj_terms = Vec::new();
    if obj_code != 'L' {
        let count = lines.count("number of objective quadratic entries")?;
        for _ in 0..count {
            let (idx, v) = lines.entry("objective quadratic entry", &[n, n])?;
            obj_terms.push(half_q_term(idx[0], idx[1], v));
        }
    }
    problem.obj_linear = lines.defaulted("objective linear coefficients", n)?;
    problem.obj_constant = lines.float("objective constant")?;
    problem.set_obj_terms(obj_terms);

    let mut rows: Vec<(Vec<Term>, Vec<(usize, f64)>)> = vec![(Vec::new(), Vec::new()); m];
    let mut cl = Vec::new();
    let mut cu = Vec::new();
    let mut infinity = 1e20;
    if m > 0 {
        if matches!(con_code, 'D' | 'C' | 'Q') {
            let count = lines.count("number of constraint quadratic entries")?;
            for _ in 0..count {
                let (idx, v) = lines.entry("constraint quadratic entry", &[m, n, n])?;
                rows[idx[0]].0.push(half_q_term(idx[1], idx[2], v));
            }
        }
        let count = lines.count("number of constraint linear entries")?;
        for _ in 0..count {
            let (idx, v) = lines.entry("constraint linear entry", &[m, n])?;
            rows[idx[0]].1.push((idx[1], v));
        }
        infinity = lines.float("infinity value")?;
        cl = lines.defaulted("constraint lower bounds", m)?;
        cu = lines.defaulted("constraint upper bounds", m)?;
    } else if var_code != 'B' {
        infinity = lines.float("infinity value")?;
    }
    let clip = |v: f64| {
        if v >= infinity {
            f64::INFINITY
        } else if v <= -infinity {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let (lb, ub) = if var_code == 'B' {
        (vec![0.0; n], vec![1.0; n])
    } else {
        (lines.defaulted("variable lower bounds", n)?, lines.defaulted("variable upper bounds", n)?)
    };
    let kinds = match var_code {
        'C' => vec![VarKind::Continuous; n],
        'B' => vec![VarKind::Binary; n],
        'I' => vec![VarKind::Integer; n],
        _ => {
            let codes = lines.defaulted("variable types", n)?;
            let mut kinds = Vec::with_capacity(n);
            for c in codes {
                kinds.push(match c as i64 {
                    0 => VarKind::Continuous,
                    1 => VarKind::Integer,
                    2 => VarKind::Binary,
                    _ => return Err(Error::Unsupported(format!("variable type code {c}"))),
                });
            }
            kinds
        }
    };
    for k in 0..n {
        problem.set_var(k, kinds[k], clip(lb[k]), clip(ub[k]));
    }
    // Remaining sections (starting points, names) carry no model data.

    for (r, (terms, linear)) in rows.into_iter().enumerate() {
        let (lo, hi) = (clip(cl[r]), clip(cu[r]));
        let name = format!("c{}", r + 1);
        if lo == hi {
            problem.add_constraint(QuadConstraint::new(name, terms, linear, -lo, ConSense::Eq));
            continue;
        }
        if lo.is_finite() && hi.is_finite() {
            problem.add_constraint(QuadConstraint::new(
                format!("{name}_lo"),
                terms.clone(),
                linear.clone(),
                -lo,
                ConSense::Ge,
            ));
            problem.add_constraint(QuadConstraint::new(format!("{name}_up"), terms, linear, -hi, ConSense::Le));
        } else if lo.is_finite() {
            problem.add_constraint(QuadConstraint::new(name, terms, linear, -lo, ConSense::Ge));
        } else if hi.is_finite() {
            problem.add_constraint(QuadConstraint::new(name, terms, linear, -hi, ConSense::Le));
        }
    }

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
    problem.validate()?;
    Ok(problem)
}
