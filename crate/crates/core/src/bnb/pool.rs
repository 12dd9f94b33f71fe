use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::Serialize;

use crate::model::Problem;
use crate::presolve::Postsolve;
use crate::util::point_key;

/// Feasibility tolerance applied to candidates on the original problem.
pub const POOL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolEntry {
    /// Point in the presolved space.
    pub reduced: Vec<f64>,
    /// Point in the original space.
    pub point: Vec<f64>,
    /// Original objective, minimization form.
    pub value: f64,
    pub max_violation: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Submission {
    Duplicate,
    Infeasible,
    Feasible,
    Improved,
}

/// Every distinct candidate seen by a worker, judged on the original
/// problem. Feasible entries are kept; of the infeasible ones only the
/// least violated is remembered.
#[derive(Debug, Clone, Default)]
pub struct SolutionPool {
    feasible: Vec<PoolEntry>,
    keys: HashSet<Vec<i64>>,
    incumbent: Option<usize>,
    least_violated: Option<PoolEntry>,
}

impl SolutionPool {
    /// Evaluates `y` (presolved space): integer coordinates within `1e-6`
    /// of an integer are snapped, the point is lifted, and feasibility is
    /// checked at [`POOL_TOL`].
    pub fn submit(&mut self, original: &Problem, postsolve: &Postsolve, integer: &[bool], y: &[f64]) -> Submission {
        let mut y = y.to_vec();
        for k in 0..y.len() {
            if integer[k] && (y[k] - y[k].round()).abs() <= POOL_TOL {
                y[k] = y[k].round() + 0.0;
            }
        }
        if !self.keys.insert(point_key(&y)) {
            return Submission::Duplicate;
        }
        let mut point = postsolve.lift(&y);
        for k in 0..point.len() {
            if original.kinds[k].is_integral() && (point[k] - point[k].round()).abs() <= POOL_TOL {
                point[k] = point[k].round() + 0.0;
            }
        }
        let report = original.check_feasibility(&point, POOL_TOL, POOL_TOL);
        let value = original.objective_unchecked(&point);
        let entry = PoolEntry {
            reduced: y,
            point,
            value,
            max_violation: report.max_violation,
            feasible: report.feasible,
        };
        if !entry.feasible {
            if self
                .least_violated
                .as_ref()
                .map_or(true, |e| entry.max_violation < e.max_violation)
            {
                self.least_violated = Some(entry);
            }
            return Submission::Infeasible;
        }
        let improves = self.incumbent().map_or(true, |inc| value < inc.value);
        self.feasible.push(entry);
        if improves {
            self.incumbent = Some(self.feasible.len() - 1);
            Submission::Improved
        } else {
            Submission::Feasible
        }
    }

    pub fn incumbent(&self) -> Option<&PoolEntry> {
        self.incumbent.map(|k| &self.feasible[k])
    }

    /// The incumbent, or else the least violated candidate.
    pub fn best_reference(&self) -> Option<&PoolEntry> {
        self.incumbent().or(self.least_violated.as_ref())
    }

    pub fn feasible_entries(&self) -> &[PoolEntry] {
        &self.feasible
    }

    /// Number of distinct candidates submitted.
    pub fn seen(&self) -> usize {
        self.keys.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncumbentEvent {
    /// Seconds since the store was created.
    pub time: f64,
    /// Minimization form.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharedBest {
    pub value: f64,
    pub reduced: Vec<f64>,
    pub point: Vec<f64>,
}

#[derive(Debug, Default)]
struct SharedInner {
    best: Option<SharedBest>,
    events: Vec<IncumbentEvent>,
}

/// Monotone incumbent store shared by the workers of a portfolio.
///
/// `offer` is an atomic compare-and-improve; the recorded events form the
/// merged global trace. Reaching the optional target value raises the stop
/// flag for every worker.
#[derive(Debug)]
pub struct SharedIncumbent {
    start: Instant,
    best_bits: AtomicU64,
    inner: Mutex<SharedInner>,
    stop: Arc<AtomicBool>,
    target: Option<f64>,
}

impl SharedIncumbent {
    pub fn new(start: Instant, target: Option<f64>) -> Self {
        SharedIncumbent {
            start,
            best_bits: AtomicU64::new(f64::INFINITY.to_bits()),
            inner: Mutex::new(SharedInner::default()),
            stop: Arc::new(AtomicBool::new(false)),
            target,
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn start(&self) -> Instant {
        self.start
    }

    pub fn stop_flag(&self) -> Arc<AtomicBool> {
        self.stop.clone()
    }

    pub fn request_stop(&self) {
        self.stop.store(true, Ordering::Relaxed);
    }

    pub fn best_value(&self) -> Option<f64> {
        let v = f64::from_bits(self.best_bits.load(Ordering::Acquire));
        v.is_finite().then_some(v)
    }

    /// `value` is at or below the target (within `1e-9` relative).
    pub fn meets_target(&self, value: f64) -> bool {
        self.target
            .is_some_and(|t| value <= t + 1e-9 * (1.0 + t.abs()))
    }

    /// Records `value` if it improves on the stored best. Returns whether
    /// it did.
    pub fn offer(&self, value: f64, reduced: &[f64], point: &[f64]) -> bool {
        if value >= f64::from_bits(self.best_bits.load(Ordering::Acquire)) {
            return false;
        }
        let mut inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        if inner.best.as_ref().is_some_and(|b| value >= b.value) {
            return false;
        }
        inner.best = Some(SharedBest {
            value,
            reduced: reduced.to_vec(),
            point: point.to_vec(),
        });
        let time = self.elapsed();
        inner.events.push(IncumbentEvent { time, value });
        self.best_bits.store(value.to_bits(), Ordering::Release);
        if self.meets_target(value) {
            self.request_stop();
        }
        true
    }

    pub fn best(&self) -> Option<SharedBest> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).best.clone()
    }

    pub fn events(&self) -> Vec<IncumbentEvent> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).events.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConSense, QuadConstraint, VarKind};

    fn knapsack() -> Problem {
        let mut p = Problem::new("k", 2);
        p.set_var(0, VarKind::Binary, 0.0, 1.0);
        p.set_var(1, VarKind::Binary, 0.0, 1.0);
        p.obj_linear = vec![-1.0, -2.0];
        p.add_constraint(QuadConstraint::new("r", vec![], vec![(0, 1.0), (1, 1.0)], -1.0, ConSense::Le));
        p
    }

    #[test]
    fn pool_tracks_incumbent() {
        let p = knapsack();
        let post = Postsolve::identity(2);
        let int = [true, true];
        let mut pool = SolutionPool::default();
        assert_eq!(pool.submit(&p, &post, &int, &[1.0, 1.0]), Submission::Infeasible);
        assert_eq!(pool.submit(&p, &post, &int, &[0.0, 0.0]), Submission::Improved);
        assert_eq!(pool.submit(&p, &post, &int, &[1.0, 0.0]), Submission::Improved);
        assert_eq!(pool.submit(&p, &post, &int, &[1.0, 1e-12]), Submission::Duplicate);
        assert_eq!(pool.submit(&p, &post, &int, &[0.0, 1.0]), Submission::Improved);
        assert_eq!(pool.incumbent().unwrap().value, -2.0);
        assert_eq!(pool.feasible_entries().len(), 3);
        assert_eq!(pool.seen(), 4);
    }

    #[test]
    fn fractional_candidates_rejected() {
        let p = knapsack();
        let mut pool = SolutionPool::default();
        let s = pool.submit(&p, &Postsolve::identity(2), &[true, true], &[0.5, 0.5]);
        assert_eq!(s, Submission::Infeasible);
        assert!(pool.incumbent().is_none());
        assert!(pool.best_reference().is_some());
    }

    #[test]
    fn store_is_monotone() {
        let s = SharedIncumbent::new(Instant::now(), Some(-5.0));
        assert!(s.offer(3.0, &[], &[]));
        assert!(!s.offer(3.0, &[], &[]));
        assert!(!s.offer(4.0, &[], &[]));
        assert!(s.offer(-1.0, &[], &[]));
        assert!(!s.stop_flag().load(Ordering::Relaxed));
        assert!(s.offer(-5.0, &[], &[]));
        assert!(s.stop_flag().load(Ordering::Relaxed));
        let values: Vec<f64> = s.events().iter().map(|e| e.value).collect();
        assert_eq!(values, vec![3.0, -1.0, -5.0]);
        assert_eq!(s.best_value(), Some(-5.0));
    }
}
