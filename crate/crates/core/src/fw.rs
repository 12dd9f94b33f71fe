//! Blended pairwise conditional gradients (BPCG) over a linear minimization
//! oracle.
//!
//! The iterate is kept as an explicit convex combination of oracle vertices,
//! the [`ActiveSet`]. Each iteration compares the *local* pairwise gap
//! `<grad, a - s>` between the worst (away) and best (local) active vertex
//! with the current global gap estimate `phi`:
//!
//! * if the local gap is at least `phi`, weight is moved from `a` to `s`
//!   (pairwise step, `gamma <= weight(a)`, `a` is dropped when the cap is hit);
//! * otherwise a cached vertex good for `phi / 2` is reused, or the oracle is
//!   called and `phi` is refreshed to `<grad, x - v>`; then a Frank-Wolfe step
//!   towards the vertex is taken.
//!
//! Step sizes come from [`secant_step`] on the directional derivative,
//! followed by a halving safeguard that keeps the objective nonincreasing.

use crate::error::{Error, Result};
use crate::lmo::{Lmo, Region, ROW_TOL};
use crate::penalty::SmoothFunction;
use crate::util::{dot, point_key, StopSignal};

/// Default gap tolerance at branch-and-bound nodes.
pub const DEFAULT_NODE_EPS: f64 = 1e-4;
/// Default iteration budget per node.
pub const DEFAULT_MAX_ITER: usize = 10;

/// Convex combination of region vertices with a cached iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    vertices: Vec<Vec<f64>>,
    weights: Vec<f64>,
    keys: Vec<Vec<i64>>,
    x: Vec<f64>,
}

impl ActiveSet {
    pub fn singleton(v: Vec<f64>) -> Self {
        ActiveSet {
            keys: vec![point_key(&v)],
            x: v.clone(),
            vertices: vec![v],
            weights: vec![1.0],
        }
    }

    /// Builds a set from weighted vertices: duplicates merged, zero weights
    /// dropped, weights renormalized to sum to one.
    pub fn from_weighted(vertices: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if vertices.is_empty() || vertices.len() != weights.len() {
            return Err(Error::InvalidInput("active set needs matching, nonempty vertices and weights".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidInput("negative active-set weight".into()));
        }
        let n = vertices[0].len();
        let mut set = ActiveSet {
            vertices: Vec::new(),
            weights: Vec::new(),
            keys: Vec::new(),
            x: vec![0.0; n],
        };
        for (v, w) in vertices.into_iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            if v.len() != n {
                return Err(Error::Dimension { expected: n, got: v.len() });
            }
            let key = point_key(&v);
            match set.keys.iter().position(|k| *k == key) {
                Some(i) => set.weights[i] += w,
                None => {
                    set.keys.push(key);
                    set.vertices.push(v);
                    set.weights.push(w);
                }
            }
        }
        let total: f64 = set.weights.iter().sum();
        if set.vertices.is_empty() || total <= 0.0 {
            return Err(Error::InvalidInput("active set weights sum to zero".into()));
        }
        for w in &mut set.weights {
            *w /= total;
        }
        set.recompute_iterate();
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iterate(&self) -> &[f64] {
        &self.x
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.vertices.iter().map(|v| v.as_slice()).zip(self.weights.iter().copied())
    }

    pub fn recompute_iterate(&mut self) {
        let n = self.x.len();
        let mut x = vec![0.0; n];
        for (v, w) in self.vertices.iter().zip(&self.weights) {
            for k in 0..n {
                x[k] += w * v[k];
            }
        }
        self.x = x;
    }

    /// Weights nonnegative and summing to one, iterate consistent, no
    /// duplicate vertices (all within `1e-9`).
    pub fn check_invariants(&self) -> Result<()> {
        let total: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("active-set weights invalid (sum {total})")));
        }
        let n = self.x.len();
        for k in 0..n {
            let combo: f64 = self.vertices.iter().zip(&self.weights).map(|(v, w)| w * v[k]).sum();
            if (combo - self.x[k]).abs() > 1e-9 {
                return Err(Error::Numerical(format!("iterate drifted at coordinate {k}")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        if !self.keys.iter().all(|k| seen.insert(k)) {
            return Err(Error::Numerical("duplicate active-set vertex".into()));
        }
        Ok(())
    }

    /// Indices of the vertices with the largest and smallest `<grad, v>`.
    fn away_and_local(&self, grad: &[f64]) -> ((usize, f64), (usize, f64)) {
        let mut away = (0, f64::NEG_INFINITY);
        let mut local = (0, f64::INFINITY);
        for (i, v) in self.vertices.iter().enumerate() {
            let s = dot(grad, v);
            if s > away.1 {
                away = (i, s);
            }
            if s < local.1 {
                local = (i, s);
            }
        }
        (away, local)
    }

    /// `x <- (1 - gamma) x + gamma v`. Returns vertices dropped when
    /// `gamma == 1`.
    fn frank_wolfe_update(&mut self, v: Vec<f64>, gamma: f64) -> Vec<Vec<f64>> {
        if gamma >= 1.0 {
            let dropped: Vec<Vec<f64>> = std::mem::take(&mut self.vertices)
                .into_iter()
                .filter(|u| point_key(u) != point_key(&v))
                .collect();
            *self = ActiveSet::singleton(v);
            return dropped;
        }
        for w in &mut self.weights {
            *w *= 1.0 - gamma;
        }
        for k in 0..self.x.len() {
            self.x[k] += gamma * (v[k] - self.x[k]);
        }
        let key = point_key(&v);
        match self.keys.iter().position(|k| *k == key) {
            Some(i) => self.weights[i] += gamma,
            None => {
                self.keys.push(key);
                self.vertices.push(v);
                self.weights.push(gamma);
            }
        }
        Vec::new()
    }

    /// Moves `gamma` weight from `away` to `local`; drops `away` when its
    /// weight is exhausted and returns it.
    fn pairwise_update(&mut self, away: usize, local: usize, gamma: f64) -> Option<Vec<f64>> {
        for k in 0..self.x.len() {
            self.x[k] += gamma * (self.vertices[local][k] - self.vertices[away][k]);
        }
        self.weights[local] += gamma;
        if gamma >= self.weights[away] {
            self.weights.swap_remove(away);
            self.keys.swap_remove(away);
            Some(self.vertices.swap_remove(away))
        } else {
            self.weights[away] -= gamma;
            None
        }
    }
}

/// Approximate root of `phi_prime` on `[0, gamma_max]` by secant iterations
/// started from the interval endpoints.
///
/// Returns 0 when the function does not decrease at 0 and `gamma_max` when it
/// still decreases at `gamma_max`. At most 40 iterations, stopping when
/// `|phi'| <= 1e-10` or consecutive iterates are within `1e-12`.
pub fn secant_step<F: FnMut(f64) -> f64>(mut phi_prime: F, gamma_max: f64) -> f64 {
    if !(gamma_max > 0.0) {
        return 0.0;
    }
    let d0 = phi_prime(0.0);
    if !(d0 < 0.0) {
        return 0.0;
    }
    let d1 = phi_prime(gamma_max);
    if d1 <= 0.0 {
        return gamma_max;
    }
    let (mut a, mut fa) = (0.0, d0);
    let (mut b, mut fb) = (gamma_max, d1);
    for _ in 0..40 {
        let denom = fb - fa;
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let c = (b - fb * (b - a) / denom).clamp(0.0, gamma_max);
        let fc = phi_prime(c);
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        if fb.abs() <= 1e-10 || (b - a).abs() < 1e-12 {
            break;
        }
    }
    b.clamp(0.0, gamma_max)
}

/// Step size along `d` from `x`, then halved until `f` does not increase.
fn safeguarded_step<F: SmoothFunction + ?Sized>(
    f: &F,
    x: &[f64],
    d: &[f64],
    gamma_max: f64,
    fx: f64,
    scratch: &mut [f64],
    trial: &mut [f64],
) -> f64 {
    let mut gamma = secant_step(
        |g| {
            for k in 0..x.len() {
                trial[k] = x[k] + g * d[k];
            }
            f.gradient(trial, scratch);
            dot(scratch, d)
        },
        gamma_max,
    );
    while gamma >= 1e-12 {
        for k in 0..x.len() {
            trial[k] = x[k] + gamma * d[k];
        }
        if f.value(trial) <= fx {
            return gamma;
        }
        gamma *= 0.5;
    }
    0.0
}

#[derive(Debug, Clone)]
pub struct FwSettings {
    pub max_iter: usize,
    /// Stop once a fresh dual gap is at most this.
    pub eps: f64,
    pub lazy: bool,
    pub stop: StopSignal,
}

impl Default for FwSettings {
    fn default() -> Self {
        FwSettings {
            max_iter: DEFAULT_MAX_ITER,
            eps: DEFAULT_NODE_EPS,
            lazy: true,
            stop: StopSignal::none(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FwResult {
    pub x: Vec<f64>,
    pub active_set: ActiveSet,
    /// Last fresh `<grad, x - v>` from a true oracle call.
    pub dual_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Trusted oracle vertices returned during the run.
    pub discovered: Vec<Vec<f64>>,
    /// Vertices removed from the active set.
    pub dropped: Vec<Vec<f64>>,
    /// Objective at the start and after every iteration.
    pub objective_history: Vec<f64>,
}

/// Runs BPCG from `warm` until the gap drops to `eps`, `max_iter` steps are
/// taken, or the stop signal fires.
pub fn bpcg<F: SmoothFunction + ?Sized>(
    f: &F,
    region: &Region,
    lmo: &mut Lmo,
    warm: ActiveSet,
    settings: &FwSettings,
) -> Result<FwResult> {
    let n = region.n();
    if f.dim() != n || warm.iterate().len() != n {
        return Err(Error::Dimension { expected: n, got: warm.iterate().len() });
    }
    let mut aset = warm;
    let mut x = aset.iterate().to_vec();
    let mut grad = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut fx = f.value_and_gradient(&x, &mut grad);
    let mut history = vec![fx];
    let mut discovered = Vec::new();
    let mut dropped = Vec::new();

    let keep = |v: &[f64], trusted: bool, discovered: &mut Vec<Vec<f64>>| {
        if trusted && region.contains(v, ROW_TOL) {
            discovered.push(v.to_vec());
        }
    };

    let first = lmo.minimize(&grad, region)?;
    keep(&first.x, first.trusted, &mut discovered);
    let mut phi = dot(&grad, &x) - dot(&grad, &first.x);
    let mut pending = Some(first.x);
    let mut converged = phi <= settings.eps;
    let mut iterations = 0;
    // set when a step could not move; the next step then uses a fresh oracle call
    let mut stalled = false;

    while !converged && iterations < settings.max_iter && !settings.stop.should_stop() {
        iterations += 1;
        let ((a_idx, a_val), (s_idx, s_val)) = aset.away_and_local(&grad);
        let local_gap = a_val - s_val;

        if local_gap >= phi && a_idx != s_idx && !stalled {
            let d: Vec<f64> = (0..n)
                .map(|k| aset.vertices[s_idx][k] - aset.vertices[a_idx][k])
                .collect();
            let gamma_max = aset.weights[a_idx];
            let gamma = safeguarded_step(f, &x, &d, gamma_max, fx, &mut scratch, &mut trial);
            if gamma > 0.0 {
                // hitting the cap drops the away vertex exactly
                let gamma = if gamma >= gamma_max { gamma_max } else { gamma };
                if let Some(v) = aset.pairwise_update(a_idx, s_idx, gamma) {
                    dropped.push(v);
                }
            } else {
                stalled = true;
                continue;
            }
        } else {
            let v = match pending.take() {
                Some(v) => v,
                None => {
                    let lazy_hit = if settings.lazy && !stalled {
                        lmo.lazy(&grad, &x, phi, region)
                    } else {
                        None
                    };
                    match lazy_hit {
                        Some(v) => v,
                        None => {
                            let fresh = lmo.minimize(&grad, region)?;
                            keep(&fresh.x, fresh.trusted, &mut discovered);
                            phi = dot(&grad, &x) - dot(&grad, &fresh.x);
                            if phi <= settings.eps {
                                converged = true;
                                history.push(fx);
                                break;
                            }
                            fresh.x
                        }
                    }
                }
            };
            let d: Vec<f64> = (0..n).map(|k| v[k] - x[k]).collect();
            let gamma = safeguarded_step(f, &x, &d, 1.0, fx, &mut scratch, &mut trial);
            if gamma > 0.0 {
                dropped.extend(aset.frank_wolfe_update(v, gamma));
                stalled = false;
            } else if stalled {
                // neither a pairwise nor a fresh FW step can make progress
                history.push(fx);
                break;
            } else {
                stalled = true;
            }
        }
        pending = None;

        x.copy_from_slice(aset.iterate());
        fx = f.value_and_gradient(&x, &mut grad);
        history.push(fx);
    }

    Ok(FwResult {
        x: aset.iterate().to_vec(),
        active_set: aset,
        dual_gap: phi,
        iterations,
        converged,
        discovered,
        dropped,
        objective_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmo::{box_lmo, MipSettings};
    use crate::model::{Problem, VarKind};

    fn unit_box(n: usize) -> Region {
        Region::new(vec![0.0; n], vec![1.0; n], vec![], vec![false; n]).unwrap()
    }

    fn lmo() -> Lmo {
        Lmo::new(MipSettings::default(), StopSignal::none())
    }

    /// `sum (x_k - 0.5)^2`.
    fn centered_quadratic(n: usize) -> Problem {
        let mut p = Problem::new("q", n);
        for k in 0..n {
            p.set_var(k, VarKind::Continuous, 0.0, 1.0);
            p.add_obj_term(k, k, 1.0);
            p.obj_linear[k] = -1.0;
        }
        p.obj_constant = 0.25 * n as f64;
        p
    }

    #[test]
    fn secant_examples() {
        let g = secant_step(|g| 2.0 * (g - 0.3), 1.0);
        assert!((g - 0.3).abs() < 1e-9);
        assert_eq!(secant_step(|g| 1.0 + g, 1.0), 0.0);
        assert_eq!(secant_step(|g| 2.0 * (g - 2.0), 1.0), 1.0);
    }

    #[test]
    fn secant_nonquadratic_root() {
        // phi(g) = (g - 0.4)^4 has phi'(g) = 4 (g - 0.4)^3
        let g = secant_step(|g| 4.0 * (g - 0.4f64).powi(3), 1.0);
        assert!((g - 0.4).abs() < 1e-2, "{g}");
    }

    #[test]
    fn converges_to_box_center() {
        let f = centered_quadratic(2);
        let region = unit_box(2);
        let warm = ActiveSet::singleton(vec![0.0, 0.0]);
        let settings = FwSettings {
            max_iter: 10_000,
            eps: 1e-6,
            ..FwSettings::default()
        };
        let res = bpcg(&f, &region, &mut lmo(), warm, &settings).unwrap();
        assert!(res.converged);
        assert!((res.x[0] - 0.5).abs() < 1e-4 && (res.x[1] - 0.5).abs() < 1e-4, "{:?}", res.x);
        res.active_set.check_invariants().unwrap();
    }

    #[test]
    fn linear_objective_from_optimal_vertex() {
        let mut f = Problem::new("lin", 3);
        f.obj_linear = vec![1.0, -1.0, 2.0];
        let region = unit_box(3);
        let opt = box_lmo(&f.obj_linear, &region);
        let settings = FwSettings {
            eps: 1e-6,
            ..FwSettings::default()
        };
        let res = bpcg(&f, &region, &mut lmo(), ActiveSet::singleton(opt), &settings).unwrap();
        assert!(res.iterations <= 2);
        assert!(res.dual_gap <= 1e-6);
    }

    #[test]
    fn unreachable_tolerance_terminates() {
        // eps = 0 cannot be certified in floating point; the run must still end
        let mut f = Problem::new("skew", 6);
        for k in 0..6 {
            f.set_var(k, VarKind::Continuous, 0.0, 1.0);
            f.add_obj_term(k, k, 1.0 + k as f64 * 0.37);
            f.obj_linear[k] = -0.9 - 0.31 * k as f64;
        }
        f.add_obj_term(0, 5, 0.45);
        f.add_obj_term(2, 3, -0.6);
        let settings = FwSettings {
            max_iter: 1_000_000,
            eps: 0.0,
            ..FwSettings::default()
        };
        let warm = ActiveSet::singleton(vec![0.0; 6]);
        let res = bpcg(&f, &unit_box(6), &mut lmo(), warm, &settings).unwrap();
        assert!(res.iterations < 100_000, "{}", res.iterations);
        assert!(res.dual_gap < 1e-8, "{}", res.dual_gap);
        res.active_set.check_invariants().unwrap();
    }

    #[test]
    fn single_step_budget() {
        let f = centered_quadratic(3);
        let settings = FwSettings {
            max_iter: 1,
            eps: 1e-9,
            ..FwSettings::default()
        };
        let res = bpcg(&f, &unit_box(3), &mut lmo(), ActiveSet::singleton(vec![0.0, 1.0, 0.0]), &settings).unwrap();
        assert_eq!(res.iterations, 1);
        res.active_set.check_invariants().unwrap();
        assert!(res.objective_history[1] <= res.objective_history[0]);
    }

    #[test]
    fn nonconvex_objective_is_monotone() {
        // -sum (x_k - 0.3)^2 + coupling, concave-ish over the box
        let mut f = Problem::new("nc", 4);
        for k in 0..4 {
            f.set_var(k, VarKind::Continuous, 0.0, 1.0);
            f.add_obj_term(k, k, -1.0);
            f.obj_linear[k] = 0.6 - 0.1 * k as f64;
        }
        f.add_obj_term(0, 2, 0.7);
        f.add_obj_term(1, 3, -0.4);
        let settings = FwSettings {
            max_iter: 200,
            eps: 1e-9,
            ..FwSettings::default()
        };
        let warm = ActiveSet::from_weighted(
            vec![vec![0.0; 4], vec![1.0, 1.0, 0.0, 0.0]],
            vec![0.5, 0.5],
        )
        .unwrap();
        let res = bpcg(&f, &unit_box(4), &mut lmo(), warm, &settings).unwrap();
        for w in res.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()), "{:?}", res.objective_history);
        }
        res.active_set.check_invariants().unwrap();
    }

    #[test]
    fn active_set_merges_duplicates() {
        let s = ActiveSet::from_weighted(
            vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.weights(), &[0.5, 0.5]);
        assert_eq!(s.iterate(), &[0.5, 0.5]);
        s.check_invariants().unwrap();
        assert!(ActiveSet::from_weighted(vec![vec![1.0]], vec![-1.0]).is_err());
    }

    #[test]
    fn pairwise_drop_records_vertex() {
        let mut s = ActiveSet::from_weighted(vec![vec![0.0], vec![1.0]], vec![0.25, 0.75]).unwrap();
        let dropped = s.pairwise_update(0, 1, 0.25);
        assert_eq!(dropped, Some(vec![0.0]));
        assert_eq!(s.len(), 1);
        assert_eq!(s.iterate(), &[1.0]);
        s.check_invariants().unwrap();
    }
}
