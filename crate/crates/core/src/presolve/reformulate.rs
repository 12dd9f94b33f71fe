//! Structural rewrites that remove quadratic rows from the penalty.

use serde::Serialize;

use crate::model::{ConSense, ConstraintTag, Problem, QuadConstraint, Term, VarKind};

/// How an original variable is recovered from a point of the reformulated
/// problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Recover {
    /// Copied from this reduced index.
    Var(usize),
    /// `factor * x_var^2`, for perspective variables that were eliminated.
    Square { var: usize, factor: f64 },
}

/// Maps points of a reformulated problem back to the original variables.
/// Auxiliary variables appended by reformulations are projected out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Postsolve {
    recover: Vec<Recover>,
}

impl Postsolve {
    pub fn identity(n: usize) -> Self {
        Postsolve {
            recover: (0..n).map(Recover::Var).collect(),
        }
    }

    pub fn original_n(&self) -> usize {
        self.recover.len()
    }

    pub fn is_identity(&self) -> bool {
        self.recover
            .iter()
            .enumerate()
            .all(|(k, r)| *r == Recover::Var(k))
    }

    pub fn lift(&self, reduced: &[f64]) -> Vec<f64> {
        self.recover
            .iter()
            .map(|r| match *r {
                Recover::Var(k) => reduced[k],
                Recover::Square { var, factor } => factor * reduced[var] * reduced[var],
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplementarityRewrite {
    pub constraint: String,
    pub x_i: usize,
    pub x_j: usize,
    pub z: usize,
}

/// Rewrites every complementarity `x_i x_j = 0` whose variables are
/// nonnegative with finite upper bounds into a fresh binary `z` and the rows
/// `x_i <= ub_i z`, `x_j <= ub_j (1 - z)`. The smaller index is the one
/// forced to zero when `z = 0`. Rows that do not qualify are left for the
/// penalty.
pub fn reformulate_complementarity(problem: &Problem) -> (Problem, Vec<ComplementarityRewrite>) {
    let mut out = problem.clone();
    out.constraints.clear();
    let mut applied = Vec::new();
    for c in &problem.constraints {
        let qualifies = c.is_complementarity_pattern() && {
            let (i, j) = (c.terms[0].i, c.terms[0].j);
            [i, j]
                .iter()
                .all(|&k| problem.lb[k] >= 0.0 && problem.ub[k].is_finite())
        };
        if !qualifies {
            out.constraints.push(c.clone());
            continue;
        }
        let (i, j) = (c.terms[0].i, c.terms[0].j);
        let z = out.push_var(VarKind::Binary, 0.0, 1.0);
        let mut on = QuadConstraint::new(
            format!("{}_z0", c.name),
            vec![],
            vec![(i, 1.0), (z, -problem.ub[i])],
            0.0,
            ConSense::Le,
        );
        on.tag = ConstraintTag::Indicator;
        let mut off = QuadConstraint::new(
            format!("{}_z1", c.name),
            vec![],
            vec![(j, 1.0), (z, problem.ub[j])],
            -problem.ub[j],
            ConSense::Le,
        );
        off.tag = ConstraintTag::Indicator;
        out.constraints.push(on);
        out.constraints.push(off);
        applied.push(ComplementarityRewrite {
            constraint: c.name.clone(),
            x_i: i,
            x_j: j,
            z,
        });
    }
    (out, applied)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerspectiveRewrite {
    pub constraint: String,
    /// Indices in the original problem.
    pub x: usize,
    pub z: usize,
    pub w: usize,
    /// Coefficient of the `x^2` term moved into the objective.
    pub coef: f64,
}

/// `(x, z, w, ratio)` if `c` reads `a x^2 - b z w <= 0` with `a, b > 0`,
/// `ratio = a / b`, and the variable conditions hold.
fn perspective_pattern(problem: &Problem, c: &QuadConstraint, w_rows: &[usize]) -> Option<(usize, usize, usize, f64)> {
    if c.sense != ConSense::Le || !c.linear.is_empty() || c.constant != 0.0 || c.terms.len() != 2 {
        return None;
    }
    let (square, cross) = match (c.terms[0].i == c.terms[0].j, c.terms[1].i == c.terms[1].j) {
        (true, false) => (c.terms[0], c.terms[1]),
        (false, true) => (c.terms[1], c.terms[0]),
        _ => return None,
    };
    let (a, b) = (square.coef, -cross.coef);
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    let x = square.i;
    let ratio = a / b;
    for (z, w) in [(cross.i, cross.j), (cross.j, cross.i)] {
        if x == z || x == w || !problem.is_binary(z) {
            continue;
        }
        let ok = problem.lb[x] >= 0.0
            && problem.ub[x].is_finite()
            && problem.kinds[w] == VarKind::Continuous
            && problem.lb[w] == 0.0
            && problem.ub[w] >= ratio * problem.ub[x] * problem.ub[x]
            && w_rows[w] == 1
            && problem.obj_linear[w] > 0.0
            && problem.obj_terms.iter().all(|t| t.i != w && t.j != w);
        if ok {
            return Some((x, z, w, ratio));
        }
    }
    None
}

/// Rewrites `x^2 <= z w` (binary `z`, `x, w >= 0`) where `w` only appears
/// in this row and linearly in the objective with coefficient `c > 0`:
/// the row and `w` are removed, `c x^2` joins the objective and the
/// activation row `x <= ub(x) z` is added.
///
/// Scaled rows `a x^2 <= b z w` are accepted; the moved term is then
/// `c (a / b) x^2`. Removing variables renumbers the rest; the returned
/// [`Postsolve`] recovers `w = (a / b) x^2`.
pub fn reformulate_perspective(problem: &Problem) -> (Problem, Vec<PerspectiveRewrite>, Postsolve) {
    let n = problem.n();
    let mut w_rows = vec![0usize; n];
    for c in &problem.constraints {
        let mut seen: Vec<usize> = c.variables().collect();
        seen.sort_unstable();
        seen.dedup();
        for k in seen {
            w_rows[k] += 1;
        }
    }

    let mut removed_rows = vec![false; problem.constraints.len()];
    let mut eliminated: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut rewrites = Vec::new();
    let mut extra_obj = Vec::new();
    let mut activation = Vec::new();
    for (r, c) in problem.constraints.iter().enumerate() {
        let Some((x, z, w, ratio)) = perspective_pattern(problem, c, &w_rows) else {
            continue;
        };
        // `x` or `z` may have been eliminated as a `w` of an earlier row.
        if eliminated[w].is_some() || eliminated[x].is_some() || eliminated[z].is_some() {
            continue;
        }
        let coef = problem.obj_linear[w] * ratio;
        removed_rows[r] = true;
        eliminated[w] = Some((x, ratio));
        extra_obj.push((x, coef));
        activation.push((c.name.clone(), x, z));
        rewrites.push(PerspectiveRewrite {
            constraint: c.name.clone(),
            x,
            z,
            w,
            coef,
        });
    }
    if rewrites.is_empty() {
        return (problem.clone(), rewrites, Postsolve::identity(n));
    }

    let mut new_index = vec![usize::MAX; n];
    let mut next = 0;
    for k in 0..n {
        if eliminated[k].is_none() {
            new_index[k] = next;
            next += 1;
        }
    }
    let remap = |k: usize| new_index[k];

    let mut out = Problem::new(problem.name.clone(), next);
    out.sense = problem.sense;
    out.obj_constant = problem.obj_constant;
    for k in 0..n {
        let nk = new_index[k];
        if nk != usize::MAX {
            out.kinds[nk] = problem.kinds[k];
            out.lb[nk] = problem.lb[k];
            out.ub[nk] = problem.ub[k];
            out.obj_linear[nk] = problem.obj_linear[k];
        }
    }
    let mut terms: Vec<Term> = problem
        .obj_terms
        .iter()
        .map(|t| Term::new(remap(t.i), remap(t.j), t.coef))
        .collect();
    terms.extend(extra_obj.iter().map(|&(x, coef)| Term::new(remap(x), remap(x), coef)));
    out.set_obj_terms(terms);

    for (r, c) in problem.constraints.iter().enumerate() {
        if removed_rows[r] {
            continue;
        }
        let mut moved = c.clone();
        moved.terms = c.terms.iter().map(|t| Term::new(remap(t.i), remap(t.j), t.coef)).collect();
        moved.linear = c.linear.iter().map(|&(k, a)| (remap(k), a)).collect();
        out.constraints.push(moved);
    }
    for (name, x, z) in activation {
        let mut row = QuadConstraint::new(
            format!("{name}_on"),
            vec![],
            vec![(remap(x), 1.0), (remap(z), -problem.ub[x])],
            0.0,
            ConSense::Le,
        );
        row.tag = ConstraintTag::Perspective;
        out.constraints.push(row);
    }

    let recover = (0..n)
        .map(|k| match eliminated[k] {
            Some((x, factor)) => Recover::Square { var: remap(x), factor },
            None => Recover::Var(remap(k)),
        })
        .collect();
    (out, rewrites, Postsolve { recover })
}
