//! Transformations applied once before the search starts.
//!
//! The pipeline tightens bounds on the linear rows, rewrites perspective
//! and complementarity rows into linear rows plus binaries, closes the box
//! with artificial bounds where needed, and optionally shifts the spectrum
//! of an all-binary objective. Points of the result map back to the input
//! through [`Postsolve::lift`].

mod convexify;
mod propagate;
mod reformulate;

use serde::Serialize;

pub use convexify::{
    convexification_shift, convexify_binary, convexify_with_spectrum, eigen_symmetric, nonnegative_count, Spectrum,
};
pub use propagate::{propagate_bounds, DEFAULT_MAX_ROUNDS};
pub use reformulate::{
    reformulate_complementarity, reformulate_perspective, ComplementarityRewrite, PerspectiveRewrite, Postsolve,
    Recover,
};

use crate::error::Result;
use crate::model::Problem;

/// Magnitude of the bounds given to variables that stay unbounded.
pub const ARTIFICIAL_BOUND: f64 = 1e5;

#[derive(Debug, Clone, PartialEq)]
pub struct PresolveOptions {
    pub max_rounds: usize,
    pub complementarity: bool,
    pub perspective: bool,
    pub artificial_bound: f64,
    /// Convexification parameter; ignored unless the problem is an
    /// all-binary QP without quadratic rows.
    pub ell: Option<f64>,
}

impl Default for PresolveOptions {
    fn default() -> Self {
        PresolveOptions {
            max_rounds: DEFAULT_MAX_ROUNDS,
            complementarity: true,
            perspective: true,
            artificial_bound: ARTIFICIAL_BOUND,
            ell: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Transform {
    Propagation { tightened: usize },
    Perspective(PerspectiveRewrite),
    Complementarity(ComplementarityRewrite),
    ArtificialBounds { count: usize, bound: f64 },
    Convexification { ell: f64, shift: f64 },
}

#[derive(Debug, Clone)]
pub struct PresolveResult {
    pub problem: Problem,
    pub transforms: Vec<Transform>,
    pub postsolve: Postsolve,
    pub artificial_bounds: bool,
    /// `(ell, s)` when convexification ran.
    pub convexification: Option<(f64, f64)>,
}

impl PresolveResult {
    pub fn lb(&self) -> &[f64] {
        &self.problem.lb
    }

    pub fn ub(&self) -> &[f64] {
        &self.problem.ub
    }
}

fn count_tightened(before: &Problem, lb: &[f64], ub: &[f64]) -> usize {
    (0..before.n())
        .filter(|&k| lb[k] > before.lb[k] || ub[k] < before.ub[k])
        .count()
}

/// Runs the full pipeline. Fails with [`crate::Error::Infeasible`] when
/// propagation crosses bounds.
pub fn presolve(problem: &Problem, options: &PresolveOptions) -> Result<PresolveResult> {
    problem.validate()?;
    let mut transforms = Vec::new();
    let mut current = problem.clone();

    let (lb, ub) = propagate_bounds(&current, options.max_rounds)?;
    let tightened = count_tightened(&current, &lb, &ub);
    current.lb = lb;
    current.ub = ub;

    let mut postsolve = Postsolve::identity(problem.n());
    if options.perspective {
        let (next, rewrites, post) = reformulate_perspective(&current);
        if !rewrites.is_empty() {
            current = next;
            postsolve = post;
            transforms.extend(rewrites.into_iter().map(Transform::Perspective));
        }
    }
    if options.complementarity {
        let (next, rewrites) = reformulate_complementarity(&current);
        if !rewrites.is_empty() {
            current = next;
            transforms.extend(rewrites.into_iter().map(Transform::Complementarity));
        }
    }

    // New rows may tighten further.
    let (lb, ub) = propagate_bounds(&current, options.max_rounds)?;
    let tightened = tightened + count_tightened(&current, &lb, &ub);
    current.lb = lb;
    current.ub = ub;
    if tightened > 0 {
        transforms.insert(0, Transform::Propagation { tightened });
    }

    // +-B, widened when the finite side already lies beyond it.
    let big = options.artificial_bound;
    let mut count = 0;
    for k in 0..current.n() {
        if !current.lb[k].is_finite() {
            let ub = current.ub[k];
            current.lb[k] = if ub > -big { -big } else { ub - big };
            count += 1;
        }
        if !current.ub[k].is_finite() {
            let lb = current.lb[k];
            current.ub[k] = if lb < big { big } else { lb + big };
            count += 1;
        }
    }
    if count > 0 {
        transforms.push(Transform::ArtificialBounds {
            count,
            bound: options.artificial_bound,
        });
    }

    let mut convexification = None;
    if let Some(ell) = options.ell {
        if current.is_all_binary() && !current.has_quadratic_constraints() {
            let (next, shift) = convexify_binary(&current, ell)?;
            current = next;
            convexification = Some((ell, shift));
            transforms.push(Transform::Convexification { ell, shift });
        }
    }

    Ok(PresolveResult {
        problem: current,
        transforms,
        postsolve,
        artificial_bounds: count > 0,
        convexification,
    })
}
