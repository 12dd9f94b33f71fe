//! In-memory representation of a mixed-integer quadratically constrained
//! quadratic program and exact evaluation of its objective and constraints.
//!
//! # Term convention
//!
//! Quadratic parts are stored as sparse lists of [`Term`]s. A term
//! `(i, j, q)` with `i <= j` contributes `q * x_i * x_j`; there is no
//! implicit factor one half. The objective value is
//!
//! ```text
//! sum_{(i,j,q)} q * x_i * x_j + d^T x + c0
//! ```
//!
//! which equals `1/2 x^T Q x + d^T x + c0` for the symmetric matrix with
//! `Q_ij = Q_ji = q` when `i < j` and `Q_ii = 2q`. [`Problem::dense_objective_matrix`]
//! assembles that matrix; every transformation in the crate works on the
//! term list directly.
//!
//! Internally every problem is a minimization. Maximization instances are
//! negated when they are read, and [`Problem::to_original_sense`] maps values
//! back for reporting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::CompensatedSum;

/// Default absolute tolerance on constraint and bound violation.
pub const DEFAULT_TOL_CONS: f64 = 1e-6;
/// Default tolerance on distance to the nearest integer.
pub const DEFAULT_TOL_INT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConSense {
    Le,
    Ge,
    Eq,
}

/// Structural role of a constraint, assigned when it is added and refined
/// by presolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintTag {
    Generic,
    Complementarity,
    Perspective,
    Indicator,
}

/// `coef * x_i * x_j` with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub i: usize,
    pub j: usize,
    pub coef: f64,
}

impl Term {
    pub fn new(i: usize, j: usize, coef: f64) -> Self {
        if i <= j {
            Term { i, j, coef }
        } else {
            Term { i: j, j: i, coef }
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coef * x[self.i] * x[self.j]
    }

    /// Adds `scale * d(term)/dx` into `grad`.
    #[inline]
    pub fn add_gradient(&self, x: &[f64], scale: f64, grad: &mut [f64]) {
        if self.i == self.j {
            grad[self.i] += scale * 2.0 * self.coef * x[self.i];
        } else {
            grad[self.i] += scale * self.coef * x[self.j];
            grad[self.j] += scale * self.coef * x[self.i];
        }
    }
}

/// Orients every term so that `i <= j`, merges duplicates, drops zeros and
/// sorts by `(i, j)`.
pub fn canonicalize_terms(terms: &mut Vec<Term>) {
    for t in terms.iter_mut() {
        *t = Term::new(t.i, t.j, t.coef);
    }
    terms.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
    let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms.drain(..) {
        match merged.last_mut() {
            Some(last) if last.i == t.i && last.j == t.j => last.coef += t.coef,
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.coef != 0.0);
    *terms = merged;
}

fn canonicalize_linear(linear: &mut Vec<(usize, f64)>) {
    linear.sort_by_key(|&(k, _)| k);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(linear.len());
    for (k, a) in linear.drain(..) {
        match merged.last_mut() {
            Some(last) if last.0 == k => last.1 += a,
            _ => merged.push((k, a)),
        }
    }
    merged.retain(|&(_, a)| a != 0.0);
    *linear = merged;
}

/// `terms + linear + constant (sense) 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConstraint {
    pub name: String,
    pub terms: Vec<Term>,
    pub linear: Vec<(usize, f64)>,
    pub constant: f64,
    pub sense: ConSense,
    pub tag: ConstraintTag,
}

impl QuadConstraint {
    pub fn new(
        name: impl Into<String>,
        mut terms: Vec<Term>,
        mut linear: Vec<(usize, f64)>,
        constant: f64,
        sense: ConSense,
    ) -> Self {
        canonicalize_terms(&mut terms);
        canonicalize_linear(&mut linear);
        QuadConstraint {
            name: name.into(),
            terms,
            linear,
            constant,
            sense,
            tag: ConstraintTag::Generic,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.terms.is_empty()
    }

    /// `x_i * x_j = 0` with nothing else in the row.
    pub fn is_complementarity_pattern(&self) -> bool {
        self.sense == ConSense::Eq
            && self.linear.is_empty()
            && self.constant == 0.0
            && self.terms.len() == 1
            && self.terms[0].i != self.terms[0].j
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        let quad: f64 = self.terms.iter().map(|t| t.eval(x)).sum();
        let lin: f64 = self.linear.iter().map(|&(k, a)| a * x[k]).sum();
        quad + lin + self.constant
    }

    /// Nonnegative amount by which `x` violates the row.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let g = self.lhs(x);
        match self.sense {
            ConSense::Le => g.max(0.0),
            ConSense::Ge => (-g).max(0.0),
            ConSense::Eq => g.abs(),
        }
    }

    /// Adds `scale * grad(lhs)` into `grad`.
    pub fn add_gradient(&self, x: &[f64], scale: f64, grad: &mut [f64]) {
        for t in &self.terms {
            t.add_gradient(x, scale, grad);
        }
        for &(k, a) in &self.linear {
            grad[k] += scale * a;
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms
            .iter()
            .flat_map(|t| [t.i, t.j])
            .chain(self.linear.iter().map(|&(k, _)| k))
    }

    fn negated(&self) -> Self {
        QuadConstraint {
            name: self.name.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.i, t.j, -t.coef))
                .collect(),
            linear: self.linear.iter().map(|&(k, a)| (k, -a)).collect(),
            constant: -self.constant,
            sense: ConSense::Le,
            tag: self.tag,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub max_violation: f64,
    pub worst_constraint: Option<usize>,
    pub integral: bool,
    pub in_bounds: bool,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    pub sense: ObjSense,
    pub obj_terms: Vec<Term>,
    pub obj_linear: Vec<f64>,
    pub obj_constant: f64,
    pub constraints: Vec<QuadConstraint>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub kinds: Vec<VarKind>,
}

impl Problem {
    /// `n` continuous free variables, zero objective, no constraints.
    pub fn new(name: impl Into<String>, n: usize) -> Self {
        Problem {
            name: name.into(),
            sense: ObjSense::Minimize,
            obj_terms: Vec::new(),
            obj_linear: vec![0.0; n],
            obj_constant: 0.0,
            constraints: Vec::new(),
            lb: vec![f64::NEG_INFINITY; n],
            ub: vec![f64::INFINITY; n],
            kinds: vec![VarKind::Continuous; n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.kinds.len()
    }

    /// Sets kind and bounds. Binary bounds are intersected with `[0, 1]`.
    pub fn set_var(&mut self, k: usize, kind: VarKind, lb: f64, ub: f64) {
        let (lb, ub) = match kind {
            VarKind::Binary => (lb.max(0.0), ub.min(1.0)),
            _ => (lb, ub),
        };
        self.kinds[k] = kind;
        self.lb[k] = lb;
        self.ub[k] = ub;
    }

    /// Appends a variable and returns its index.
    pub fn push_var(&mut self, kind: VarKind, lb: f64, ub: f64) -> usize {
        self.kinds.push(kind);
        self.lb.push(0.0);
        self.ub.push(0.0);
        self.obj_linear.push(0.0);
        let k = self.n() - 1;
        self.set_var(k, kind, lb, ub);
        k
    }

    pub fn add_obj_term(&mut self, i: usize, j: usize, coef: f64) {
        self.obj_terms.push(Term::new(i, j, coef));
        canonicalize_terms(&mut self.obj_terms);
    }

    /// Replaces the objective terms, canonicalizing them.
    pub fn set_obj_terms(&mut self, mut terms: Vec<Term>) {
        canonicalize_terms(&mut terms);
        self.obj_terms = terms;
    }

    /// Adds a constraint in normalized form: GE rows are negated into LE,
    /// quadratic EQ rows are split into an LE pair unless they are
    /// complementarities, linear EQ rows are kept as equalities.
    pub fn add_constraint(&mut self, mut c: QuadConstraint) {
        canonicalize_terms(&mut c.terms);
        canonicalize_linear(&mut c.linear);
        match c.sense {
            ConSense::Le => self.constraints.push(c),
            ConSense::Ge => self.constraints.push(c.negated()),
            ConSense::Eq => {
                if c.is_complementarity_pattern() {
                    c.tag = ConstraintTag::Complementarity;
                    self.constraints.push(c);
                } else if c.is_linear() {
                    self.constraints.push(c);
                } else {
                    let name = c.name.clone();
                    let mut upper = c.clone();
                    upper.sense = ConSense::Le;
                    upper.name = format!("{name}_le");
                    let mut lower = c.negated();
                    lower.name = format!("{name}_ge");
                    self.constraints.push(upper);
                    self.constraints.push(lower);
                }
            }
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Objective in minimization form.
    pub fn eval_objective(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.objective_unchecked(x))
    }

    pub(crate) fn objective_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = CompensatedSum::default();
        for t in &self.obj_terms {
            acc.add_triple(t.coef, x[t.i], x[t.j]);
        }
        for (d, v) in self.obj_linear.iter().zip(x) {
            acc.add_product(*d, *v);
        }
        acc.add(self.obj_constant);
        acc.value()
    }

    /// Writes the objective gradient into `grad`.
    pub fn objective_gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.copy_from_slice(&self.obj_linear);
        for t in &self.obj_terms {
            t.add_gradient(x, 1.0, grad);
        }
    }

    /// Left-hand side `g_i(x)` of the stored (normalized) constraint.
    pub fn eval_constraint(&self, idx: usize, x: &[f64]) -> Result<f64> {
        let c = self.constraints.get(idx).ok_or(Error::ConstraintIndex {
            index: idx,
            len: self.constraints.len(),
        })?;
        self.check_dim(x)?;
        Ok(c.lhs(x))
    }

    pub fn check_feasibility(&self, x: &[f64], tol_cons: f64, tol_int: f64) -> FeasibilityReport {
        debug_assert_eq!(x.len(), self.n());
        let mut integral = true;
        let mut bound_violation: f64 = 0.0;
        for k in 0..self.n() {
            if self.kinds[k].is_integral() && (x[k] - x[k].round()).abs() > tol_int {
                integral = false;
            }
            bound_violation = bound_violation
                .max(self.lb[k] - x[k])
                .max(x[k] - self.ub[k]);
        }
        let mut worst = None;
        let mut worst_value = 0.0;
        for (i, c) in self.constraints.iter().enumerate() {
            let v = c.violation(x);
            if v > worst_value {
                worst_value = v;
                worst = Some(i);
            }
        }
        let in_bounds = bound_violation <= tol_cons;
        let max_violation = worst_value.max(bound_violation);
        FeasibilityReport {
            max_violation,
            worst_constraint: worst,
            integral,
            in_bounds,
            feasible: integral && in_bounds && max_violation <= tol_cons,
        }
    }

    /// Checks the structural invariants of the model.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.lb.len() != n || self.ub.len() != n || self.obj_linear.len() != n {
            return Err(Error::InvalidInput("vector lengths disagree".into()));
        }
        let in_range = |k: usize| {
            if k < n {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("variable index {k} out of range")))
            }
        };
        for t in &self.obj_terms {
            in_range(t.j)?;
            if t.i > t.j || t.coef == 0.0 {
                return Err(Error::InvalidInput("objective term not canonical".into()));
            }
        }
        for c in &self.constraints {
            for k in c.variables() {
                in_range(k)?;
            }
        }
        for k in 0..n {
            if self.kinds[k] == VarKind::Binary && (self.lb[k] < 0.0 || self.ub[k] > 1.0) {
                return Err(Error::InvalidInput(format!("binary variable {k} outside [0,1]")));
            }
        }
        Ok(())
    }

    /// Symmetric `Q` with `1/2 x^T Q x` equal to the quadratic objective part.
    pub fn dense_objective_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut q = vec![vec![0.0; n]; n];
        for t in &self.obj_terms {
            if t.i == t.j {
                q[t.i][t.i] += 2.0 * t.coef;
            } else {
                q[t.i][t.j] += t.coef;
                q[t.j][t.i] += t.coef;
            }
        }
        q
    }

    pub fn is_all_binary(&self) -> bool {
        (0..self.n()).all(|k| self.is_binary(k))
    }

    /// Binary kind, or integer with bounds inside `[0, 1]`.
    pub fn is_binary(&self, k: usize) -> bool {
        match self.kinds[k] {
            VarKind::Binary => true,
            VarKind::Integer => self.lb[k] >= 0.0 && self.ub[k] <= 1.0,
            VarKind::Continuous => false,
        }
    }

    pub fn is_pure_integer(&self) -> bool {
        self.kinds.iter().all(|k| k.is_integral())
    }

    pub fn has_quadratic_constraints(&self) -> bool {
        self.constraints.iter().any(|c| !c.is_linear())
    }

    pub fn integer_mask(&self) -> Vec<bool> {
        self.kinds.iter().map(|k| k.is_integral()).collect()
    }

    /// Maps an internal (minimization) objective value to the instance's sense.
    pub fn to_original_sense(&self, value: f64) -> f64 {
        match self.sense {
            ObjSense::Minimize => value,
            ObjSense::Maximize => -value,
        }
    }
}
