//! Power-penalty relaxation of quadratic constraints.
//!
//! Each quadratic row `g_i(x) <= 0` is dropped from the feasible region and
//! replaced by the objective term `w_i * max(g_i(x), 0)^p` with `p > 1`,
//! which is continuously differentiable and vanishes on the feasible side.
//! Complementarity equalities that presolve could not reformulate are
//! penalized on both sides. Linear rows are not penalized; they stay in the
//! region handled by the oracle.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{ConSense, Problem};

/// Default penalty exponent.
pub const DEFAULT_P: f64 = 1.5;

/// Value and gradient oracle of a differentiable function on `R^n`.
pub trait SmoothFunction {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64], grad: &mut [f64]);

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.gradient(x, grad);
        self.value(x)
    }
}

/// The plain objective of a problem, constraints ignored.
impl SmoothFunction for Problem {
    fn dim(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.objective_unchecked(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.objective_gradient(x, grad);
    }
}

/// `max(g, 0)^p`.
#[inline]
pub fn penalty_value(g: f64, p: f64) -> f64 {
    if g > 0.0 {
        g.powf(p)
    } else {
        0.0
    }
}

/// `d/dg max(g, 0)^p`.
#[inline]
fn penalty_slope(g: f64, p: f64) -> f64 {
    if g > 0.0 {
        p * g.powf(p - 1.0)
    } else {
        0.0
    }
}

/// `f(x) + sum_i w_i max(g_i(x), 0)^p` over the quadratic constraints.
#[derive(Debug)]
pub struct SmoothObjective {
    problem: Arc<Problem>,
    p: f64,
    penalized: Vec<usize>,
    weights: Vec<f64>,
    value_evals: AtomicU64,
    gradient_evals: AtomicU64,
}

impl SmoothObjective {
    /// Unit weights, or `1 / max(1, max |coef|)` per row with `auto_scale`.
    pub fn new(problem: Arc<Problem>, p: f64, auto_scale: bool) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("penalty exponent must be > 1, got {p}")));
        }
        let penalized: Vec<usize> = problem
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_linear())
            .map(|(i, _)| i)
            .collect();
        let weights = penalized
            .iter()
            .map(|&i| {
                if auto_scale {
                    let c = &problem.constraints[i];
                    let largest = c
                        .terms
                        .iter()
                        .map(|t| t.coef.abs())
                        .chain(c.linear.iter().map(|(_, a)| a.abs()))
                        .fold(0.0f64, f64::max);
                    1.0 / largest.max(1.0)
                } else {
                    1.0
                }
            })
            .collect();
        Ok(SmoothObjective {
            problem,
            p,
            penalized,
            weights,
            value_evals: AtomicU64::new(0),
            gradient_evals: AtomicU64::new(0),
        })
    }

    /// Explicit weights, one per penalized constraint, all nonnegative.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.penalized.len() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidInput("one nonnegative weight per penalized row".into()));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    /// Indices (into `problem.constraints`) of the penalized rows.
    pub fn penalized(&self) -> &[usize] {
        &self.penalized
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(value evaluations, gradient evaluations)`.
    pub fn evaluations(&self) -> (u64, u64) {
        (
            self.value_evals.load(Ordering::Relaxed),
            self.gradient_evals.load(Ordering::Relaxed),
        )
    }

    /// Penalty part alone.
    pub fn penalty(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (&i, &w) in self.penalized.iter().zip(&self.weights) {
            let c = &self.problem.constraints[i];
            let g = c.lhs(x);
            total += w * match c.sense {
                ConSense::Eq => penalty_value(g, self.p) + penalty_value(-g, self.p),
                ConSense::Ge => penalty_value(-g, self.p),
                ConSense::Le => penalty_value(g, self.p),
            };
        }
        total
    }

    pub fn relaxed_value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; x.len()];
        let v = self.value_and_gradient(x, &mut grad);
        (v, grad)
    }
}

impl SmoothFunction for SmoothObjective {
    fn dim(&self) -> usize {
        self.problem.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_evals.fetch_add(1, Ordering::Relaxed);
        self.problem.objective_unchecked(x) + self.penalty(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.gradient_evals.fetch_add(1, Ordering::Relaxed);
        self.problem.objective_gradient(x, grad);
        for (&i, &w) in self.penalized.iter().zip(&self.weights) {
            let c = &self.problem.constraints[i];
            let g = c.lhs(x);
            let slope = match c.sense {
                ConSense::Eq => penalty_slope(g, self.p) - penalty_slope(-g, self.p),
                ConSense::Ge => -penalty_slope(-g, self.p),
                ConSense::Le => penalty_slope(g, self.p),
            };
            if slope != 0.0 {
                c.add_gradient(x, w * slope, grad);
            }
        }
    }
}
