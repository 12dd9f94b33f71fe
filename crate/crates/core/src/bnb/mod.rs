//! Branch-and-bound over Frank-Wolfe relaxations.
//!
//! Nodes are never pruned by bound: the penalized relaxation gives no valid
//! lower bound, so the tree is a search device and the incumbent comes from
//! the vertices and heuristic candidates it produces. Depth-first order with
//! periodic restarts keeps it moving.

mod node;
mod pool;

use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use node::{branch, restart_policy, select_branching_variable, Node, RestartAction};
pub use pool::{IncumbentEvent, PoolEntry, SharedBest, SharedIncumbent, SolutionPool, Submission, POOL_TOL};

use crate::error::{Error, Result};
use crate::fw::{bpcg, ActiveSet, FwResult, FwSettings, DEFAULT_MAX_ITER, DEFAULT_NODE_EPS};
use crate::lmo::{Lmo, LmoStats, MipSettings, Region};
use crate::lns::{
    asens, bipartite_qubo_improve, follow_the_gradient, probability_rounding, rins, standard_rounding, undercover,
    Neighbourhood, SubproblemBudget, DEFAULT_FTG_BUDGET, DEFAULT_PROBABILITY_TRIALS,
};
use crate::metrics::IncumbentTrace;
use crate::model::Problem;
use crate::penalty::{SmoothFunction, SmoothObjective, DEFAULT_P};
use crate::presolve::{convexify_with_spectrum, eigen_symmetric, presolve, Postsolve, PresolveOptions, Spectrum};
use crate::util::{point_key, StopSignal};

pub const DEFAULT_RESTART_INTERVAL: usize = 100;
/// Allowed range of the restart interval.
pub const RESTART_INTERVAL_RANGE: (usize, usize) = (10, 1000);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicToggles {
    pub rounding: bool,
    pub probability_rounding: bool,
    pub ftg: bool,
    pub asens: bool,
    pub rins: bool,
    pub undercover: bool,
    pub qubo_bipartite: bool,
}

impl Default for HeuristicToggles {
    fn default() -> Self {
        HeuristicToggles {
            rounding: true,
            probability_rounding: true,
            ftg: true,
            asens: true,
            rins: true,
            undercover: true,
            qubo_bipartite: false,
        }
    }
}

impl HeuristicToggles {
    /// Only standard rounding.
    pub fn rounding_only() -> Self {
        HeuristicToggles {
            rounding: true,
            probability_rounding: false,
            ftg: false,
            asens: false,
            rins: false,
            undercover: false,
            qubo_bipartite: false,
        }
    }
}

/// Settings of one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub p: f64,
    /// Convexification parameter for all-binary QPs without quadratic rows.
    pub ell: Option<f64>,
    pub auto_scale: bool,
    pub fw_max_iter: usize,
    pub node_eps: f64,
    pub lazy: bool,
    pub restart_interval: usize,
    pub seed: u64,
    pub time_limit: Duration,
    pub node_limit: Option<usize>,
    pub heuristics: HeuristicToggles,
    pub probability_trials: usize,
    pub ftg_budget: usize,
    pub lmo: MipSettings,
    pub subproblem: SubproblemBudget,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: DEFAULT_P,
            ell: None,
            auto_scale: false,
            fw_max_iter: DEFAULT_MAX_ITER,
            node_eps: DEFAULT_NODE_EPS,
            lazy: true,
            restart_interval: DEFAULT_RESTART_INTERVAL,
            seed: 0,
            time_limit: Duration::from_secs(300),
            node_limit: None,
            heuristics: HeuristicToggles::default(),
            probability_trials: DEFAULT_PROBABILITY_TRIALS,
            ftg_budget: DEFAULT_FTG_BUDGET,
            lmo: MipSettings::default(),
            subproblem: SubproblemBudget::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = RESTART_INTERVAL_RANGE;
        if !(lo..=hi).contains(&self.restart_interval) {
            return Err(Error::InvalidInput(format!(
                "restart interval {} outside [{lo}, {hi}]",
                self.restart_interval
            )));
        }
        if !(self.p > 1.0) {
            return Err(Error::InvalidInput(format!("penalty exponent must be > 1, got {}", self.p)));
        }
        if let Some(ell) = self.ell {
            if !(0.0..=1.0).contains(&ell) {
                return Err(Error::InvalidInput(format!("ell must lie in [0, 1], got {ell}")));
            }
        }
        if self.fw_max_iter == 0 {
            return Err(Error::InvalidInput("at least one Frank-Wolfe iteration per node".into()));
        }
        Ok(())
    }
}

/// The original problem, its presolved form and the lifting map, shared by
/// all workers.
#[derive(Debug)]
pub struct SolveContext {
    pub original: Problem,
    pub reduced: Arc<Problem>,
    pub postsolve: Postsolve,
    pub region: Region,
    spectrum: OnceLock<Option<Spectrum>>,
}

impl SolveContext {
    /// Runs presolve (without convexification, which is per worker).
    pub fn new(original: Problem, options: &PresolveOptions) -> Result<Self> {
        let options = PresolveOptions { ell: None, ..options.clone() };
        let pre = presolve(&original, &options)?;
        Self::from_parts(original, pre.problem, pre.postsolve)
    }

    pub fn from_parts(original: Problem, reduced: Problem, postsolve: Postsolve) -> Result<Self> {
        let region = Region::from_problem(&reduced)?;
        Ok(SolveContext {
            original,
            reduced: Arc::new(reduced),
            postsolve,
            region,
            spectrum: OnceLock::new(),
        })
    }

    /// Whether `ell` applies: an all-binary QP without quadratic rows.
    pub fn convexifiable(&self) -> bool {
        self.reduced.is_all_binary() && !self.reduced.has_quadratic_constraints()
    }

    /// The problem whose penalized objective a worker minimizes.
    pub fn objective_problem(&self, ell: Option<f64>) -> Result<Arc<Problem>> {
        let Some(ell) = ell.filter(|_| self.convexifiable()) else {
            return Ok(self.reduced.clone());
        };
        let spectrum = self.spectrum.get_or_init(|| eigen_symmetric(&self.reduced.dense_objective_matrix()).ok());
        match spectrum {
            Some(s) => Ok(Arc::new(convexify_with_spectrum(&self.reduced, s, ell).0)),
            None => Err(Error::Numerical("eigendecomposition of the objective failed".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TimeLimit,
    NodeLimit,
    TreeExhausted,
    /// The shared store reached its target value.
    TargetReached,
    /// Another worker or the caller raised the stop flag.
    Stopped,
    Infeasible,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct HeuristicCount {
    pub submitted: usize,
    pub improved: usize,
}

/// The record of one worker run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace {
    /// This worker's own improvements, strictly decreasing, minimization form.
    pub events: Vec<IncumbentEvent>,
    pub nodes: usize,
    pub restarts: usize,
    pub termination: Termination,
    /// Best point in the original space.
    pub best_point: Option<Vec<f64>>,
    /// Minimization form.
    pub best_value: Option<f64>,
    pub elapsed: f64,
    pub lmo: LmoStats,
    pub heuristics: BTreeMap<String, HeuristicCount>,
    pub subproblems: usize,
}

impl SolveTrace {
    /// Events in the instance's own sense, for the metrics module.
    pub fn incumbent_trace(&self, original: &Problem, horizon: f64, reference: Option<f64>) -> IncumbentTrace {
        incumbent_trace(&self.events, original, horizon, reference)
    }
}

/// Converts minimization-form events to the instance's own sense.
pub fn incumbent_trace(
    events: &[IncumbentEvent],
    original: &Problem,
    horizon: f64,
    reference: Option<f64>,
) -> IncumbentTrace {
    let events = events
        .iter()
        .map(|e| (e.time, original.to_original_sense(e.value)))
        .collect();
    IncumbentTrace::new(events, horizon, reference)
}

/// Runs one worker until the time or node limit, tree exhaustion or the
/// store's stop flag.
pub fn solve(ctx: &SolveContext, config: &SolverConfig, store: &SharedIncumbent) -> Result<SolveTrace> {
    config.validate()?;
    let f = SmoothObjective::new(ctx.objective_problem(config.ell)?, config.p, config.auto_scale)?;
    let started = Instant::now();
    let stop = StopSignal {
        deadline: Some(started + config.time_limit),
        flag: Some(store.stop_flag()),
    };
    let mut worker = Worker::new(ctx, config, store, &f, stop);
    let termination = worker.run()?;
    let incumbent = worker.pool.incumbent();
    Ok(SolveTrace {
        best_point: incumbent.map(|e| e.point.clone()),
        best_value: incumbent.map(|e| e.value),
        events: worker.events,
        nodes: worker.nodes,
        restarts: worker.restarts,
        termination,
        elapsed: started.elapsed().as_secs_f64(),
        lmo: worker.lmo.stats,
        heuristics: worker.counts,
        subproblems: worker.subproblems,
    })
}

/// Convenience: presolve, then a single worker with its own store.
pub fn solve_problem(problem: &Problem, config: &SolverConfig) -> Result<SolveTrace> {
    let ctx = SolveContext::new(problem.clone(), &PresolveOptions::default())?;
    let store = SharedIncumbent::new(Instant::now(), None);
    solve(&ctx, config, &store)
}

struct Worker<'a> {
    ctx: &'a SolveContext,
    config: &'a SolverConfig,
    store: &'a SharedIncumbent,
    f: &'a SmoothObjective,
    integer: Vec<bool>,
    has_continuous: bool,
    lmo: Lmo,
    rng: ChaCha8Rng,
    pool: SolutionPool,
    stop: StopSignal,
    events: Vec<IncumbentEvent>,
    counts: BTreeMap<String, HeuristicCount>,
    neighbourhoods: HashSet<Vec<i64>>,
    label: &'static str,
    depth: usize,
    nodes: usize,
    restarts: usize,
    subproblems: usize,
    next_index: usize,
}

struct NodeOutcome {
    children: Vec<Node>,
}

impl<'a> Worker<'a> {
    fn new(
        ctx: &'a SolveContext,
        config: &'a SolverConfig,
        store: &'a SharedIncumbent,
        f: &'a SmoothObjective,
        stop: StopSignal,
    ) -> Self {
        let integer = ctx.reduced.integer_mask();
        Worker {
            has_continuous: integer.iter().any(|&b| !b),
            integer,
            lmo: Lmo::new(config.lmo.clone(), stop.clone()),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            pool: SolutionPool::default(),
            stop,
            events: Vec::new(),
            counts: BTreeMap::new(),
            neighbourhoods: HashSet::new(),
            label: "fw_vertex",
            depth: 0,
            nodes: 0,
            restarts: 0,
            subproblems: 0,
            next_index: 0,
            ctx,
            config,
            store,
            f,
        }
    }

    fn stop_reason(&self) -> Option<Termination> {
        if !self.stop.should_stop() {
            return None;
        }
        if self.store.best_value().is_some_and(|v| self.store.meets_target(v)) {
            Some(Termination::TargetReached)
        } else if self.stop.deadline.is_some_and(|d| Instant::now() >= d) {
            Some(Termination::TimeLimit)
        } else {
            Some(Termination::Stopped)
        }
    }

    fn run(&mut self) -> Result<Termination> {
        if let Some(reason) = self.stop_reason() {
            return Ok(reason);
        }
        let root = Node::root(self.ctx.region.lb.clone(), self.ctx.region.ub.clone(), 0);
        let mut stack = vec![root];
        let mut epoch_start = true;
        loop {
            if let Some(reason) = self.stop_reason() {
                return Ok(reason);
            }
            if self.config.node_limit.is_some_and(|cap| self.nodes >= cap) {
                return Ok(Termination::NodeLimit);
            }
            let Some(node) = stack.pop() else {
                return Ok(Termination::TreeExhausted);
            };
            self.nodes += 1;
            let stop = self.stop.clone();
            match self.process(node, epoch_start, true, &stop) {
                Ok(out) => stack.extend(out.children),
                Err(Error::Infeasible(_)) if self.nodes == 1 && self.restarts == 0 => {
                    return Ok(Termination::Infeasible)
                }
                // an infeasible or numerically failed node is simply dropped
                Err(Error::Infeasible(_)) | Err(Error::Numerical(_)) => {}
                Err(e) => return Err(e),
            }
            epoch_start = false;
            let action = restart_policy(
                self.nodes,
                self.config.restart_interval,
                self.restarts,
                self.pool.incumbent().is_some() || self.store.best_value().is_some(),
            );
            if action != RestartAction::Continue {
                self.restarts += 1;
                stack.clear();
                stack.push(self.restart_root(action));
                epoch_start = true;
            }
        }
    }

    /// Root of the next epoch. The shared store is read only here.
    fn restart_root(&mut self, action: RestartAction) -> Node {
        self.next_index += 1;
        let mut root = Node::root(self.ctx.region.lb.clone(), self.ctx.region.ub.clone(), self.next_index);
        match action {
            RestartAction::Warm => {
                if let Some(shared) = self.store.best() {
                    let local = self.pool.incumbent().map_or(f64::INFINITY, |e| e.value);
                    if shared.value < local {
                        self.submit(&shared.reduced, "shared");
                    }
                }
                if let Some(inc) = self.pool.incumbent() {
                    if self.ctx.region.contains(&inc.reduced, POOL_TOL) {
                        root.active_set = Some(ActiveSet::singleton(inc.reduced.clone()));
                    }
                }
            }
            _ => {
                let n = self.ctx.region.n();
                let dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut self.rng)).collect();
                root.direction = Some(dir);
            }
        }
        root
    }

    fn count(&mut self, label: &str, improved: bool) {
        let c = self.counts.entry(label.to_string()).or_default();
        c.submitted += 1;
        c.improved += usize::from(improved);
    }

    fn submit(&mut self, y: &[f64], label: &str) -> Submission {
        let outcome = self
            .pool
            .submit(&self.ctx.original, &self.ctx.postsolve, &self.integer, y);
        if outcome == Submission::Duplicate {
            return outcome;
        }
        self.count(label, outcome == Submission::Improved);
        if outcome == Submission::Improved {
            let inc = self.pool.incumbent().expect("improved implies an incumbent");
            let value = inc.value;
            self.events.push(IncumbentEvent {
                time: self.store.elapsed(),
                value,
            });
            let (reduced, point) = (inc.reduced.clone(), inc.point.clone());
            self.store.offer(value, &reduced, &point);
        }
        outcome
    }

    fn fw_settings(&self, stop: &StopSignal) -> FwSettings {
        FwSettings {
            max_iter: self.config.fw_max_iter,
            eps: self.config.node_eps,
            lazy: self.config.lazy,
            stop: stop.clone(),
        }
    }

    /// Solves the node relaxation, runs the heuristics due at this node and
    /// returns the children.
    fn process(&mut self, node: Node, epoch_start: bool, lns: bool, stop: &StopSignal) -> Result<NodeOutcome> {
        let region = self.ctx.region.with_bounds(node.lb.clone(), node.ub.clone());
        if !region.bounds_consistent() {
            return Ok(NodeOutcome { children: vec![] });
        }
        let n = region.n();
        let mut grad = vec![0.0; n];
        let direction = match (&node.direction, &node.hint) {
            (Some(d), _) => d.clone(),
            (None, Some(h)) => {
                self.f.gradient(h, &mut grad);
                grad.clone()
            }
            (None, None) => {
                let mid: Vec<f64> = (0..n).map(|k| 0.5 * (region.lb[k] + region.ub[k])).collect();
                self.f.gradient(&mid, &mut grad);
                grad.clone()
            }
        };
        let warm = match node.active_set.clone() {
            Some(set) => set,
            None => {
                let v = self.lmo.minimize(&direction, &region)?;
                if v.trusted {
                    self.submit(&v.x, self.label);
                }
                ActiveSet::singleton(v.x)
            }
        };
        let settings = self.fw_settings(stop);
        let fw = bpcg(self.f, &region, &mut self.lmo, warm, &settings)?;
        for v in &fw.discovered {
            self.submit(v, self.label);
        }
        if self.config.heuristics.rounding {
            let y = standard_rounding(&fw.x, &self.ctx.reduced);
            self.submit(&y, if lns { "rounding" } else { self.label });
        }
        if lns {
            self.primal_heuristics(&node, &region, &fw, &direction, epoch_start, stop);
        }
        let children = match select_branching_variable(&fw.x, &self.integer, &node.lb, &node.ub) {
            Some(k) => {
                let (down, up) = branch(&node, Some(&fw.active_set), k, &fw.x, &mut self.next_index);
                // depth first, down branch first
                vec![up, down]
            }
            None => vec![],
        };
        Ok(NodeOutcome { children })
    }

    fn primal_heuristics(
        &mut self,
        node: &Node,
        region: &Region,
        fw: &FwResult,
        direction: &[f64],
        epoch_start: bool,
        stop: &StopSignal,
    ) {
        let h = self.config.heuristics.clone();
        let reduced = self.ctx.reduced.clone();
        if h.probability_rounding && (epoch_start || !self.has_continuous) {
            let candidates = probability_rounding(
                &fw.x,
                &reduced,
                self.config.probability_trials,
                &mut self.rng,
                self.f,
                region,
                &mut self.lmo,
            );
            for y in candidates {
                self.submit(&y, "probability_rounding");
            }
        }
        if epoch_start && h.ftg && !stop.should_stop() {
            let f = self.f;
            if let Ok(res) = follow_the_gradient(f, region, &mut self.lmo, direction, self.config.ftg_budget, |x| {
                f.value(x)
            }) {
                for v in &res.visited {
                    self.submit(v, "ftg");
                }
            }
        }
        if epoch_start && h.undercover && !stop.should_stop() {
            let reference = self
                .pool
                .best_reference()
                .map(|e| e.reduced.clone())
                .unwrap_or_else(|| standard_rounding(&fw.x, &reduced));
            let settings = MipSettings {
                time_limit: self.config.subproblem.time_slice,
                ..self.config.lmo.clone()
            };
            if let Ok(res) = undercover(&reduced, &reference, &settings, stop) {
                if let Some(y) = res.point {
                    self.submit(&y, "undercover");
                }
            }
        }
        if epoch_start && h.qubo_bipartite && reduced.is_all_binary() && reduced.constraints.is_empty() {
            let start = standard_rounding(&fw.x, &reduced);
            if let Ok(y) = bipartite_qubo_improve(&reduced, &start) {
                self.submit(&y, "qubo_bipartite");
            }
        }
        if h.asens && self.depth < self.config.subproblem.max_depth {
            if let Some(nb) = asens(&fw.active_set, &reduced, &node.lb, &node.ub) {
                self.sub_solve(nb, &fw.x, "asens");
            }
        }
        if h.rins && self.depth < self.config.subproblem.max_depth {
            if let Some(inc) = self.pool.incumbent().map(|e| e.reduced.clone()) {
                if let Some(nb) = rins(&inc, &fw.x, &reduced, &node.lb, &node.ub) {
                    self.sub_solve(nb, &fw.x, "rins");
                }
            }
        }
    }

    /// Budgeted depth-first search restricted to a neighbourhood, without
    /// further neighbourhood searches or restarts.
    fn sub_solve(&mut self, nb: Neighbourhood, hint: &[f64], label: &'static str) {
        let mut key = point_key(&nb.lb);
        key.extend(point_key(&nb.ub));
        if !self.neighbourhoods.insert(key) || self.stop.should_stop() {
            return;
        }
        self.subproblems += 1;
        let budget = self.config.subproblem.clone();
        let stop = self.stop.tightened(Some(Instant::now() + budget.time_slice));
        let saved_stop = std::mem::replace(&mut self.lmo.stop, stop.clone());
        let saved_label = std::mem::replace(&mut self.label, label);
        self.depth += 1;

        let mut root = Node::root(nb.lb.clone(), nb.ub.clone(), 0);
        root.hint = Some(hint.iter().enumerate().map(|(k, v)| v.clamp(nb.lb[k], nb.ub[k])).collect());
        let mut stack = vec![root];
        let mut processed = 0;
        while let Some(node) = stack.pop() {
            if processed >= budget.node_cap || stop.should_stop() {
                break;
            }
            processed += 1;
            if let Ok(out) = self.process(node, false, false, &stop) {
                stack.extend(out.children);
            }
        }

        self.depth -= 1;
        self.label = saved_label;
        self.lmo.stop = saved_stop;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConSense, QuadConstraint, VarKind};

    fn binaries(n: usize) -> Problem {
        let mut p = Problem::new("b", n);
        for k in 0..n {
            p.set_var(k, VarKind::Binary, 0.0, 1.0);
        }
        p
    }

    fn quick(seed: u64) -> SolverConfig {
        SolverConfig {
            seed,
            time_limit: Duration::from_secs(5),
            ..SolverConfig::default()
        }
    }

    #[test]
    fn single_binary_solved_at_root() {
        let mut p = binaries(1);
        p.obj_linear = vec![1.0];
        let trace = solve_problem(&p, &quick(0)).unwrap();
        assert_eq!(trace.best_value, Some(0.0));
        assert_eq!(trace.best_point, Some(vec![0.0]));
        assert_eq!(trace.nodes, 1);
        assert_eq!(trace.termination, Termination::TreeExhausted);
    }

    #[test]
    fn zero_time_limit_finds_nothing() {
        let mut p = binaries(3);
        p.obj_linear = vec![1.0, -1.0, 1.0];
        let config = SolverConfig {
            time_limit: Duration::ZERO,
            ..quick(0)
        };
        let trace = solve_problem(&p, &config).unwrap();
        assert_eq!(trace.nodes, 0);
        assert!(trace.best_value.is_none() && trace.events.is_empty());
        assert_eq!(trace.termination, Termination::TimeLimit);
    }

    /// min -x0 - x1 - x2 s.t. x0*x1 + x1*x2 + x0*x2 <= 1 (at most one pair),
    /// so the relaxation is fractional and branching happens.
    fn pairs() -> Problem {
        let mut p = binaries(3);
        p.obj_linear = vec![-1.0, -1.0, -1.0];
        p.add_constraint(QuadConstraint::new(
            "pairs",
            vec![crate::model::Term::new(0, 1, 1.0), crate::model::Term::new(1, 2, 1.0), crate::model::Term::new(0, 2, 1.0)],
            vec![],
            -0.5,
            ConSense::Le,
        ));
        p
    }

    #[test]
    fn no_pruning_by_incumbent() {
        let ctx = SolveContext::new(pairs(), &PresolveOptions::default()).unwrap();
        let store = SharedIncumbent::new(Instant::now(), None);
        store.offer(-100.0, &[0.0; 3], &[0.0; 3]);
        let trace = solve(&ctx, &quick(3), &store).unwrap();
        assert!(trace.nodes > 1, "nodes {}", trace.nodes);
        // at most one of the three is 1 (no pair active)
        assert_eq!(trace.best_value, Some(-1.0));
    }

    #[test]
    fn children_nest_and_events_decrease() {
        let trace = solve_problem(&pairs(), &quick(1)).unwrap();
        assert!(trace.events.windows(2).all(|w| w[1].value < w[0].value));
        let mut next = 0;
        let node = Node::root(vec![0.0; 2], vec![3.0; 2], 0);
        let (d, u) = branch(&node, None, 1, &[1.0, 1.5], &mut next);
        for child in [d, u] {
            for k in 0..2 {
                assert!(child.lb[k] >= node.lb[k] && child.ub[k] <= node.ub[k]);
            }
        }
    }

    fn bigger(seed: u64) -> Problem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 10;
        let mut p = binaries(n);
        for i in 0..n {
            for j in i..n {
                let c: f64 = StandardNormal.sample(&mut rng);
                p.add_obj_term(i, j, c);
            }
        }
        p
    }

    #[test]
    fn deterministic_single_worker() {
        let config = SolverConfig {
            restart_interval: 10,
            node_limit: Some(60),
            time_limit: Duration::from_secs(60),
            ..quick(11)
        };
        let run = || {
            let t = solve_problem(&bigger(4), &config).unwrap();
            (t.events.iter().map(|e| e.value).collect::<Vec<_>>(), t.nodes, t.restarts, t.best_point)
        };
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a.2, a.1 / 10);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig { restart_interval: 5, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { ell: Some(1.5), ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }
}
