//! Exhaustive reference solver for small instances.
//!
//! Integer variables range over every integer in their bounds, continuous
//! variables over a uniform grid that includes both bounds. Only meant for
//! checking other components on instances with at most `2^20` points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Problem;

pub const ENUMERATION_LIMIT: usize = 1 << 20;
/// Feasibility tolerance used when enumerating.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Minimum of the internal (minimization) objective; `None` when no
    /// enumerated point is feasible.
    pub value: Option<f64>,
    pub point: Option<Vec<f64>>,
    pub enumerated: usize,
}

impl OracleResult {
    pub fn is_feasible(&self) -> bool {
        self.value.is_some()
    }
}

fn axis(problem: &Problem, k: usize, grid: usize) -> Result<Vec<f64>> {
    let (lb, ub) = (problem.lb[k], problem.ub[k]);
    if !lb.is_finite() || !ub.is_finite() {
        return Err(Error::InvalidInput(format!("variable {k} is unbounded")));
    }
    if problem.kinds[k].is_integral() {
        let (lo, hi) = ((lb - 1e-9).ceil(), (ub + 1e-9).floor());
        if hi - lo + 1.0 > ENUMERATION_LIMIT as f64 {
            return Err(Error::EnumerationTooLarge {
                size: hi - lo + 1.0,
                limit: ENUMERATION_LIMIT,
            });
        }
        return Ok((0..)
            .map(|s| lo + s as f64)
            .take_while(|v| *v <= hi)
            .collect());
    }
    if grid < 2 {
        return Err(Error::InvalidInput("continuous variables need a grid of at least 2 points".into()));
    }
    if lb == ub {
        return Ok(vec![lb]);
    }
    Ok((0..grid)
        .map(|s| lb + (ub - lb) * s as f64 / (grid - 1) as f64)
        .collect())
}

/// Minimizes the objective over the lattice subject to every constraint at
/// tolerance [`ORACLE_TOL`].
pub fn brute_force(problem: &Problem, grid_points: usize) -> Result<OracleResult> {
    let n = problem.n();
    let axes = (0..n)
        .map(|k| axis(problem, k, grid_points))
        .collect::<Result<Vec<_>>>()?;
    let size = axes.iter().map(|a| a.len() as f64).product::<f64>();
    if size > ENUMERATION_LIMIT as f64 {
        return Err(Error::EnumerationTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut result = OracleResult {
        value: None,
        point: None,
        enumerated: 0,
    };
    if axes.iter().any(|a| a.is_empty()) {
        return Ok(result);
    }

    let mut digits = vec![0usize; n];
    let mut x: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        result.enumerated += 1;
        if problem.check_feasibility(&x, ORACLE_TOL, ORACLE_TOL).feasible {
            let v = problem.objective_unchecked(&x);
            if result.value.map_or(true, |best| v < best) {
                result.value = Some(v);
                result.point = Some(x.clone());
            }
        }
        // odometer increment, last coordinate fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(result);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < axes[k].len() {
                x[k] = axes[k][digits[k]];
                break;
            }
            digits[k] = 0;
            x[k] = axes[k][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConSense, QuadConstraint, Term, VarKind};

    fn binaries(n: usize) -> Problem {
        let mut p = Problem::new("b", n);
        for k in 0..n {
            p.set_var(k, VarKind::Binary, 0.0, 1.0);
        }
        p
    }

    #[test]
    fn single_binary() {
        let mut p = binaries(1);
        p.obj_linear[0] = 1.0;
        let r = brute_force(&p, 0).unwrap();
        assert_eq!(r.value, Some(0.0));
        assert_eq!(r.point, Some(vec![0.0]));
        assert_eq!(r.enumerated, 2);
    }

    #[test]
    fn knapsack() {
        let mut p = binaries(2);
        p.obj_linear = vec![-1.0, -1.0];
        p.add_constraint(QuadConstraint::new("k", vec![], vec![(0, 1.0), (1, 1.0)], -1.0, ConSense::Le));
        assert_eq!(brute_force(&p, 0).unwrap().value, Some(-1.0));
    }

    #[test]
    fn complementarity() {
        let mut p = binaries(2);
        p.obj_linear = vec![-1.0, -1.0];
        p.add_constraint(QuadConstraint::new("c", vec![Term::new(0, 1, 1.0)], vec![], 0.0, ConSense::Eq));
        let r = brute_force(&p, 0).unwrap();
        assert_eq!(r.value, Some(-1.0));
        let x = r.point.unwrap();
        assert!(x == vec![1.0, 0.0] || x == vec![0.0, 1.0]);
    }

    #[test]
    fn limits_and_grids() {
        assert!(matches!(brute_force(&binaries(21), 0), Err(Error::EnumerationTooLarge { .. })));
        let mut p = Problem::new("c", 1);
        p.set_var(0, VarKind::Continuous, 0.0, 1.0);
        assert!(brute_force(&p, 1).is_err());
        let r = brute_force(&p, 5).unwrap();
        assert_eq!(r.enumerated, 5);
        p.set_var(0, VarKind::Continuous, 0.0, f64::INFINITY);
        assert!(brute_force(&p, 5).is_err());
    }

    #[test]
    fn infeasible_lattice() {
        let mut p = binaries(1);
        p.add_constraint(QuadConstraint::new("c", vec![], vec![(0, 2.0)], -1.0, ConSense::Eq));
        let r = brute_force(&p, 0).unwrap();
        assert!(!r.is_feasible());
        assert_eq!(r.enumerated, 2);
    }
}
