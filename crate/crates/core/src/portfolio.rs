//! Parallel portfolio: W workers with different penalty exponents or
//! convexification parameters, sharing one incumbent store.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bnb::{solve, HeuristicToggles, IncumbentEvent, SharedIncumbent, SolveContext, SolveTrace, SolverConfig};
use crate::error::{Error, Result};
use crate::model::Problem;
use crate::presolve::PresolveOptions;

pub const DEFAULT_WORKERS: usize = 8;
pub const DEFAULT_TIME_LIMIT: f64 = 300.0;

pub fn default_p_grid() -> Vec<f64> {
    (0..7).map(|k| (12 + k) as f64 / 10.0).collect()
}

pub fn default_ell_grid() -> Vec<f64> {
    (0..5).map(|k| (6 + k) as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioConfig {
    /// Seconds, including presolve.
    pub time_limit: f64,
    pub workers: usize,
    pub p_grid: Vec<f64>,
    pub ell_grid: Vec<f64>,
    /// Template for every worker; `p`, `ell`, `seed` and `time_limit` are
    /// overwritten per worker.
    pub base: SolverConfig,
    pub seed: u64,
    /// Known optimal (or best known) value in the instance's own sense.
    pub reference: Option<f64>,
    /// Stop all workers once the reference is matched.
    pub stop_at_reference: bool,
    pub presolve: PresolveOptions,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig {
            time_limit: DEFAULT_TIME_LIMIT,
            workers: DEFAULT_WORKERS,
            p_grid: default_p_grid(),
            ell_grid: default_ell_grid(),
            base: SolverConfig::default(),
            seed: 0,
            reference: None,
            stop_at_reference: false,
            presolve: PresolveOptions::default(),
        }
    }
}

impl PortfolioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidInput("at least one worker".into()));
        }
        if !(self.time_limit >= 0.0) || !self.time_limit.is_finite() {
            return Err(Error::InvalidInput(format!("invalid time limit {}", self.time_limit)));
        }
        if self.p_grid.is_empty() || self.p_grid.iter().any(|p| !(*p > 1.0) || !p.is_finite()) {
            return Err(Error::InvalidInput("p values must be finite and > 1".into()));
        }
        if self.ell_grid.is_empty() || self.ell_grid.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidInput("ell values must lie in [0, 1]".into()));
        }
        self.base.validate()
    }

    /// The heuristic toggles every worker uses.
    pub fn heuristics(&self) -> &HeuristicToggles {
        &self.base.heuristics
    }
}

/// Which parameter the workers vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Quadratic constraints present: penalty exponents.
    P,
    /// All-binary QP without quadratic constraints: convexification.
    Ell,
    /// Neither applies: one configuration, different seeds.
    Seeds,
}

pub fn grid_kind(ctx: &SolveContext) -> GridKind {
    if ctx.reduced.has_quadratic_constraints() {
        GridKind::P
    } else if ctx.convexifiable() {
        GridKind::Ell
    } else {
        GridKind::Seeds
    }
}

/// Round-robin assignment over the applicable grid, seed `base + index`.
pub fn worker_configs(config: &PortfolioConfig, kind: GridKind, time_limit: Duration) -> Vec<SolverConfig> {
    (0..config.workers)
        .map(|w| {
            let mut c = config.base.clone();
            c.seed = config.seed.wrapping_add(w as u64);
            c.time_limit = time_limit;
            match kind {
                GridKind::P => c.p = config.p_grid[w % config.p_grid.len()],
                GridKind::Ell => c.ell = Some(config.ell_grid[w % config.ell_grid.len()]),
                GridKind::Seeds => {}
            }
            c
        })
        .collect()
}

#[derive(Debug)]
pub struct PortfolioOutcome {
    pub grid: GridKind,
    pub configs: Vec<SolverConfig>,
    pub traces: Vec<SolveTrace>,
    /// Merged global trace, minimization form.
    pub events: Vec<IncumbentEvent>,
    /// Best value, minimization form, and its original-space point.
    pub best: Option<(f64, Vec<f64>)>,
    pub artificial_bounds: bool,
    pub elapsed: f64,
}

/// Presolves `problem` and runs the workers on scoped threads until the time
/// limit (measured from entry) or the reference is reached.
pub fn run_portfolio(problem: &Problem, config: &PortfolioConfig) -> Result<PortfolioOutcome> {
    config.validate()?;
    let start = Instant::now();
    let limit = Duration::from_secs_f64(config.time_limit);
    let options = PresolveOptions {
        ell: None,
        ..config.presolve.clone()
    };
    let pre = crate::presolve::presolve(problem, &options)?;
    let artificial_bounds = pre.artificial_bounds;
    let ctx = SolveContext::from_parts(problem.clone(), pre.problem, pre.postsolve)?;
    let grid = grid_kind(&ctx);
    let remaining = limit.saturating_sub(start.elapsed());
    let configs = worker_configs(config, grid, remaining);

    let target = config
        .reference
        .filter(|_| config.stop_at_reference)
        .map(|r| problem.to_original_sense(r));
    let store = SharedIncumbent::new(start, target);
    if ctx.convexifiable() && grid == GridKind::Ell {
        // share the eigendecomposition instead of racing for it
        ctx.objective_problem(Some(config.ell_grid[0]))?;
    }

    let results: Vec<Result<SolveTrace>> = if configs.len() == 1 {
        vec![solve(&ctx, &configs[0], &store)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = configs
                .iter()
                .map(|c| {
                    let (ctx, store) = (&ctx, &store);
                    scope.spawn(move || solve(ctx, c, store))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(Error::Numerical("worker panicked".into())))
                })
                .collect()
        })
    };
    store.request_stop();

    let mut traces = Vec::with_capacity(results.len());
    let mut first_error = None;
    for r in results {
        match r {
            Ok(t) => traces.push(t),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if traces.is_empty() {
        return Err(first_error.unwrap_or_else(|| Error::Numerical("no worker finished".into())));
    }
    Ok(PortfolioOutcome {
        grid,
        configs,
        traces,
        events: store.events(),
        best: store.best().map(|b| (b.value, b.point)),
        artificial_bounds,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConSense, QuadConstraint, Term, VarKind};

    fn binary_qp() -> Problem {
        let mut p = Problem::new("qp", 3);
        for k in 0..3 {
            p.set_var(k, VarKind::Binary, 0.0, 1.0);
        }
        p.add_obj_term(0, 1, -2.0);
        p.add_obj_term(1, 2, 3.0);
        p.obj_linear = vec![1.0, 0.5, -1.0];
        p
    }

    #[test]
    fn grids() {
        assert_eq!(default_p_grid(), vec![1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8]);
        assert_eq!(default_ell_grid(), vec![0.6, 0.7, 0.8, 0.9, 1.0]);
    }

    #[test]
    fn round_robin_assignment() {
        let config = PortfolioConfig {
            workers: 7,
            seed: 40,
            ..PortfolioConfig::default()
        };
        let cs = worker_configs(&config, GridKind::P, Duration::from_secs(1));
        let mut ps: Vec<f64> = cs.iter().map(|c| c.p).collect();
        ps.dedup();
        assert_eq!(ps.len(), 7);
        assert_eq!(cs.iter().map(|c| c.seed).collect::<Vec<_>>(), (40..47).collect::<Vec<_>>());
        let cs = worker_configs(&PortfolioConfig { workers: 6, ..config }, GridKind::Ell, Duration::from_secs(1));
        assert_eq!(cs[5].ell, Some(0.6));
        assert!(cs.iter().all(|c| c.p == crate::penalty::DEFAULT_P));
    }

    #[test]
    fn grid_selection() {
        let ctx = |p: Problem| SolveContext::new(p, &PresolveOptions::default()).unwrap();
        assert_eq!(grid_kind(&ctx(binary_qp())), GridKind::Ell);
        let mut q = binary_qp();
        q.add_constraint(QuadConstraint::new("c", vec![Term::new(0, 2, 1.0)], vec![], -0.5, ConSense::Le));
        assert_eq!(grid_kind(&ctx(q)), GridKind::P);
        let mut m = binary_qp();
        m.set_var(2, VarKind::Continuous, 0.0, 1.0);
        assert_eq!(grid_kind(&ctx(m)), GridKind::Seeds);
    }

    #[test]
    fn portfolio_matches_brute_force() {
        let p = binary_qp();
        let best = crate::oracle::brute_force(&p, 2).unwrap().value.unwrap();
        let config = PortfolioConfig {
            time_limit: 2.0,
            workers: 3,
            reference: Some(best),
            stop_at_reference: true,
            ..PortfolioConfig::default()
        };
        let out = run_portfolio(&p, &config).unwrap();
        assert_eq!(out.traces.len(), 3);
        assert!((out.best.unwrap().0 - best).abs() < 1e-9);
        assert!(out.events.windows(2).all(|w| w[1].value < w[0].value));
    }

    #[test]
    fn single_worker_equals_direct_solve() {
        let p = binary_qp();
        let config = PortfolioConfig {
            time_limit: 30.0,
            workers: 1,
            base: SolverConfig {
                node_limit: Some(40),
                ..SolverConfig::default()
            },
            ..PortfolioConfig::default()
        };
        let out = run_portfolio(&p, &config).unwrap();
        let ctx = SolveContext::new(p.clone(), &PresolveOptions::default()).unwrap();
        let store = SharedIncumbent::new(Instant::now(), None);
        let direct = solve(&ctx, &out.configs[0], &store).unwrap();
        let t = &out.traces[0];
        assert_eq!((t.nodes, t.restarts, &t.best_point), (direct.nodes, direct.restarts, &direct.best_point));
        let values = |ev: &[IncumbentEvent]| ev.iter().map(|e| e.value).collect::<Vec<_>>();
        assert_eq!(values(&t.events), values(&direct.events));
    }
}
