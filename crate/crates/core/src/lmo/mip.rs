use std::time::{Duration, Instant};

use super::simplex::{solve_bounded, LpStatus};
use super::{box_lmo, Region};
use crate::util::{dot, StopSignal};

#[derive(Debug, Clone, PartialEq)]
pub struct MipSettings {
    /// Budget for one oracle call.
    pub time_limit: Duration,
    pub node_limit: usize,
    pub int_tol: f64,
    /// A node is pruned when its LP bound is `>= incumbent - prune_tol`.
    pub prune_tol: f64,
}

impl Default for MipSettings {
    fn default() -> Self {
        MipSettings {
            time_limit: Duration::from_secs(1),
            node_limit: 200_000,
            int_tol: 1e-6,
            prune_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    /// Budget exhausted; `x` holds the incumbent if one was found.
    TimedOut,
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipResult {
    pub status: MipStatus,
    pub x: Option<Vec<f64>>,
    pub value: f64,
    pub nodes: usize,
}

/// Most fractional integer coordinate, lowest index on ties.
pub(crate) fn most_fractional(x: &[f64], integer: &[bool], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, (&v, &is_int)) in x.iter().zip(integer).enumerate() {
        if !is_int {
            continue;
        }
        let frac = v - v.floor();
        if frac <= tol || frac >= 1.0 - tol {
            continue;
        }
        let score = frac.min(1.0 - frac);
        if best.map_or(true, |(_, s)| score > s + 1e-12) {
            best = Some((k, score));
        }
    }
    best.map(|(k, _)| k)
}

/// Optimal mixed-integer vertex of `min direction . x` over the region.
///
/// Depth-first branch-and-bound over LP relaxations: most fractional
/// variable, down branch first, pruning on `bound >= incumbent - prune_tol`.
/// Regions without rows short-circuit to [`box_lmo`].
pub fn mip_lmo(direction: &[f64], region: &Region, settings: &MipSettings, stop: &StopSignal) -> MipResult {
    if !region.has_rows() {
        let x = box_lmo(direction, region);
        return MipResult {
            status: MipStatus::Optimal,
            value: dot(direction, &x),
            x: Some(x),
            nodes: 0,
        };
    }
    let stop = stop.tightened(Some(Instant::now() + settings.time_limit));
    let has_continuous = region.integer.iter().any(|&b| !b);

    let mut stack: Vec<(Vec<f64>, Vec<f64>)> = vec![(region.lb.clone(), region.ub.clone())];
    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut nodes = 0;
    let mut last_error: Option<String> = None;

    while let Some((lb, ub)) = stack.pop() {
        if nodes >= settings.node_limit || (nodes > 0 && stop.should_stop()) {
            let value = incumbent.as_ref().map_or(f64::INFINITY, |(_, v)| *v);
            return MipResult {
                status: MipStatus::TimedOut,
                x: incumbent.map(|(x, _)| x),
                value,
                nodes,
            };
        }
        nodes += 1;
        let lp = solve_bounded(direction, &region.rows, &lb, &ub);
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Error(msg) => {
                last_error = Some(msg);
                continue;
            }
            LpStatus::Optimal => {}
        }
        if let Some((_, inc)) = &incumbent {
            if lp.value >= inc - settings.prune_tol {
                continue;
            }
        }
        match most_fractional(&lp.x, &region.integer, settings.int_tol) {
            Some(k) => {
                let v = lp.x[k];
                let mut up_lb = lb.clone();
                up_lb[k] = v.ceil();
                let mut down_ub = ub.clone();
                down_ub[k] = v.floor();
                stack.push((up_lb, ub));
                stack.push((lb, down_ub));
            }
            None => {
                let (x, value) = polish_integral(direction, region, lp.x, has_continuous);
                let improves = incumbent
                    .as_ref()
                    .map_or(true, |(_, inc)| value < inc - settings.prune_tol);
                if improves {
                    incumbent = Some((x, value));
                }
            }
        }
    }

    match incumbent {
        Some((x, value)) => MipResult {
            status: MipStatus::Optimal,
            x: Some(x),
            value,
            nodes,
        },
        None => MipResult {
            status: match last_error {
                Some(msg) => MipStatus::Error(msg),
                None => MipStatus::Infeasible,
            },
            x: None,
            value: f64::INFINITY,
            nodes,
        },
    }
}

/// Snaps integer coordinates and, with continuous variables present,
/// re-solves the LP with the integers fixed so the rows hold exactly.
fn polish_integral(direction: &[f64], region: &Region, mut x: Vec<f64>, has_continuous: bool) -> (Vec<f64>, f64) {
    for k in 0..x.len() {
        if region.integer[k] {
            x[k] = x[k].round() + 0.0;
        }
    }
    if has_continuous {
        let mut lb = region.lb.clone();
        let mut ub = region.ub.clone();
        for k in 0..x.len() {
            if region.integer[k] {
                lb[k] = x[k];
                ub[k] = x[k];
            }
        }
        let lp = solve_bounded(direction, &region.rows, &lb, &ub);
        if lp.status == LpStatus::Optimal {
            let value = lp.value;
            return (lp.x, value);
        }
    }
    let value = dot(direction, &x);
    (x, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmo::LinearRow;

    fn knapsack_region() -> Region {
        Region::new(
            vec![0.0; 2],
            vec![1.0; 2],
            vec![LinearRow::le(vec![(0, 1.0), (1, 1.0)], 1.0)],
            vec![true; 2],
        )
        .unwrap()
    }

    #[test]
    fn branching_choice() {
        assert_eq!(most_fractional(&[0.5, 0.9], &[true, true], 1e-6), Some(0));
        assert_eq!(most_fractional(&[0.3, 0.7], &[true, true], 1e-6), Some(0));
        assert_eq!(most_fractional(&[1.0, 2.0], &[true, true], 1e-6), None);
        assert_eq!(most_fractional(&[0.5], &[false], 1e-6), None);
    }

    #[test]
    fn binary_knapsack() {
        let res = mip_lmo(&[-1.0, -1.0], &knapsack_region(), &MipSettings::default(), &StopSignal::none());
        assert_eq!(res.status, MipStatus::Optimal);
        assert_eq!(res.value, -1.0);
        assert_eq!(res.x, Some(vec![0.0, 1.0]));
    }

    #[test]
    fn zero_direction_returns_first_found() {
        let res = mip_lmo(&[0.0, 0.0], &knapsack_region(), &MipSettings::default(), &StopSignal::none());
        assert_eq!(res.status, MipStatus::Optimal);
        assert_eq!(res.value, 0.0);
        assert_eq!(res.nodes, 1);
    }

    #[test]
    fn box_region_matches_box_lmo() {
        let r = Region::new(vec![0.0, -2.0], vec![3.0, 2.0], vec![], vec![true, false]).unwrap();
        let d = [-1.0, 0.5];
        let res = mip_lmo(&d, &r, &MipSettings::default(), &StopSignal::none());
        assert_eq!(res.x.unwrap(), box_lmo(&d, &r));
    }

    #[test]
    fn requires_branching() {
        // 2 x0 + 2 x1 <= 3 over binaries, maximize x0 + x1: LP gives 1.5
        let r = Region::new(
            vec![0.0; 2],
            vec![1.0; 2],
            vec![LinearRow::le(vec![(0, 2.0), (1, 2.0)], 3.0)],
            vec![true; 2],
        )
        .unwrap();
        let res = mip_lmo(&[-1.0, -1.01], &r, &MipSettings::default(), &StopSignal::none());
        assert_eq!(res.status, MipStatus::Optimal);
        assert_eq!(res.x, Some(vec![0.0, 1.0]));
        assert!(res.nodes > 1);
    }

    #[test]
    fn infeasible_integer_region() {
        // 2 x = 1 has no integer solution
        let r = Region::new(
            vec![0.0],
            vec![3.0],
            vec![LinearRow::eq(vec![(0, 2.0)], 1.0)],
            vec![true],
        )
        .unwrap();
        let res = mip_lmo(&[1.0], &r, &MipSettings::default(), &StopSignal::none());
        assert_eq!(res.status, MipStatus::Infeasible);
    }

    #[test]
    fn mixed_polish_satisfies_rows() {
        // x0 integer, x1 continuous; x0 + x1 <= 2.5, min -x0 - x1
        let r = Region::new(
            vec![0.0, 0.0],
            vec![2.0, 1.0],
            vec![LinearRow::le(vec![(0, 1.0), (1, 1.0)], 2.5)],
            vec![true, false],
        )
        .unwrap();
        let res = mip_lmo(&[-1.0, -1.0], &r, &MipSettings::default(), &StopSignal::none());
        let x = res.x.unwrap();
        assert!((res.value + 2.5).abs() < 1e-12);
        assert!(r.contains(&x, 1e-9) && r.is_integral(&x));
    }
}
