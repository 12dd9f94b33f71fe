//! Primal heuristics.
//!
//! Everything here produces candidate points or neighbourhoods; none of it
//! touches the incumbent. The branch-and-bound worker submits candidates to
//! its solution pool, which checks them against the original problem, and
//! solves neighbourhoods with a budgeted sub-tree.

mod neighbourhood;
mod qubo;
mod undercover;

use std::collections::HashSet;
use std::time::Duration;

use rand::Rng;

pub use neighbourhood::{agreement_fraction, asens, rins, Neighbourhood, AGREEMENT_TOL};
pub use qubo::bipartite_qubo_improve;
pub use undercover::{undercover, vertex_cover, NonlinearityGraph, UndercoverResult};

use crate::error::Result;
use crate::fw::{bpcg, ActiveSet, FwSettings};
use crate::lmo::{Lmo, Region};
use crate::model::Problem;
use crate::penalty::SmoothFunction;
use crate::util::point_key;

/// Limits for a neighbourhood sub-solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemBudget {
    pub node_cap: usize,
    pub time_slice: Duration,
    /// Sub-solves never start further neighbourhood searches below this.
    pub max_depth: usize,
}

impl Default for SubproblemBudget {
    fn default() -> Self {
        SubproblemBudget {
            node_cap: 200,
            time_slice: Duration::from_secs(2),
            max_depth: 1,
        }
    }
}

pub const DEFAULT_PROBABILITY_TRIALS: usize = 10;
pub const DEFAULT_FTG_BUDGET: usize = 50;
/// Frank-Wolfe iterations spent on the continuous part of a rounded point.
pub const ROUNDING_FW_ITERS: usize = 50;

/// Integer coordinates rounded half-up and clamped to the bounds;
/// continuous coordinates unchanged.
pub fn standard_rounding(x: &[f64], problem: &Problem) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(k, &v)| {
            if problem.kinds[k].is_integral() {
                ((v + 0.5).floor() + 0.0).clamp(problem.lb[k].ceil(), problem.ub[k].floor())
            } else {
                v
            }
        })
        .collect()
}

/// Randomized rounding: each binary is set to 1 with probability
/// `clamp(x_k, 0, 1)`, other integers are rounded, and when continuous
/// variables exist they are re-optimized by Frank-Wolfe over `region` with
/// the integers fixed. Returns one candidate per trial.
pub fn probability_rounding<F, R>(
    x: &[f64],
    problem: &Problem,
    trials: usize,
    rng: &mut R,
    f: &F,
    region: &Region,
    lmo: &mut Lmo,
) -> Vec<Vec<f64>>
where
    F: SmoothFunction + ?Sized,
    R: Rng + ?Sized,
{
    let has_continuous = problem.kinds.iter().any(|k| !k.is_integral());
    let rounded = standard_rounding(x, problem);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut y = rounded.clone();
        for k in 0..y.len() {
            if problem.is_binary(k) {
                let prob = x[k].clamp(0.0, 1.0);
                // always draw so trials stay aligned across degenerate inputs
                let u: f64 = rng.random();
                y[k] = if u < prob { 1.0 } else { 0.0 };
            }
        }
        if has_continuous {
            if let Some(z) = continuous_completion(&y, problem, f, region, lmo) {
                y = z;
            }
        }
        out.push(y);
    }
    out
}

/// Best continuous completion of the integer part of `y` found by a short
/// Frank-Wolfe run.
fn continuous_completion<F: SmoothFunction + ?Sized>(
    y: &[f64],
    problem: &Problem,
    f: &F,
    region: &Region,
    lmo: &mut Lmo,
) -> Option<Vec<f64>> {
    let mut lb = region.lb.clone();
    let mut ub = region.ub.clone();
    for k in 0..y.len() {
        if problem.kinds[k].is_integral() {
            lb[k] = y[k];
            ub[k] = y[k];
        }
    }
    let fixed = region.with_bounds(lb, ub);
    let mut grad = vec![0.0; y.len()];
    let start: Vec<f64> = y.iter().enumerate().map(|(k, v)| v.clamp(fixed.lb[k], fixed.ub[k])).collect();
    f.gradient(&start, &mut grad);
    let v0 = lmo.minimize(&grad, &fixed).ok()?;
    let settings = FwSettings {
        max_iter: ROUNDING_FW_ITERS,
        eps: 1e-6,
        lazy: true,
        stop: lmo.stop.clone(),
    };
    bpcg(f, &fixed, lmo, ActiveSet::singleton(v0.x), &settings)
        .ok()
        .map(|r| r.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtgResult {
    /// Distinct vertices in visiting order.
    pub visited: Vec<Vec<f64>>,
    /// Index into `visited` of the lowest score.
    pub best: Option<usize>,
    pub steps: usize,
}

/// Frank-Wolfe with unit step: `v_0 = LMO(d)`, `v_{t+1} = LMO(grad f(v_t))`,
/// until a vertex repeats or `budget` follow steps are taken. `score` ranks
/// the visited vertices (typically the original objective, infinite when
/// infeasible).
pub fn follow_the_gradient<F, S>(
    f: &F,
    region: &Region,
    lmo: &mut Lmo,
    start_direction: &[f64],
    budget: usize,
    mut score: S,
) -> Result<FtgResult>
where
    F: SmoothFunction + ?Sized,
    S: FnMut(&[f64]) -> f64,
{
    let mut v = lmo.minimize(start_direction, region)?.x;
    let mut seen = HashSet::new();
    seen.insert(point_key(&v));
    let mut visited = vec![v.clone()];
    let mut grad = vec![0.0; v.len()];
    let mut steps = 0;
    while steps < budget && !lmo.stop.should_stop() {
        steps += 1;
        f.gradient(&v, &mut grad);
        v = lmo.minimize(&grad, region)?.x;
        if !seen.insert(point_key(&v)) {
            break;
        }
        visited.push(v.clone());
    }
    let mut best: Option<(usize, f64)> = None;
    for (k, p) in visited.iter().enumerate() {
        let s = score(p);
        if best.map_or(true, |(_, b)| s < b) {
            best = Some((k, s));
        }
    }
    Ok(FtgResult {
        visited,
        best: best.map(|(k, _)| k),
        steps,
    })
}
