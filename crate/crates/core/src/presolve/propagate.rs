use crate::error::{Error, Result};
use crate::model::{ConSense, Problem};

/// Default number of propagation rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 10;

const MIN_COEF: f64 = 1e-12;
const IMPROVEMENT: f64 = 1e-9;

/// `coefs . x <= rhs` views of the linear rows (equalities contribute both
/// directions).
fn linear_le_rows(problem: &Problem) -> Vec<(Vec<(usize, f64)>, f64)> {
    let mut rows = Vec::new();
    for c in problem.constraints.iter().filter(|c| c.is_linear()) {
        let rhs = -c.constant;
        match c.sense {
            ConSense::Le => rows.push((c.linear.clone(), rhs)),
            ConSense::Ge => rows.push((c.linear.iter().map(|&(k, a)| (k, -a)).collect(), -rhs)),
            ConSense::Eq => {
                rows.push((c.linear.clone(), rhs));
                rows.push((c.linear.iter().map(|&(k, a)| (k, -a)).collect(), -rhs));
            }
        }
    }
    rows
}

/// Activity-based bound tightening on the linear rows.
///
/// For a row `a . x <= beta` and each `k` with `a_k != 0`, the minimum
/// activity of the other terms bounds `x_k` from above (`a_k > 0`) or below
/// (`a_k < 0`). Integer bounds are rounded inward. Rounds repeat until no
/// bound moves or `max_rounds` is reached.
pub fn propagate_bounds(problem: &Problem, max_rounds: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lb = problem.lb.clone();
    let mut ub = problem.ub.clone();
    let integer = problem.integer_mask();
    for k in 0..problem.n() {
        if integer[k] {
            lb[k] = (lb[k] - IMPROVEMENT).ceil();
            ub[k] = (ub[k] + IMPROVEMENT).floor();
        }
    }
    check_consistent(&lb, &ub)?;
    let rows = linear_le_rows(problem);

    for _ in 0..max_rounds {
        let mut changed = false;
        for (coefs, beta) in &rows {
            let contribution = |k: usize, a: f64, lb: &[f64], ub: &[f64]| if a > 0.0 { a * lb[k] } else { a * ub[k] };
            let mut finite_sum = 0.0;
            let mut infinite = 0usize;
            for &(k, a) in coefs {
                let c = contribution(k, a, &lb, &ub);
                if c.is_finite() {
                    finite_sum += c;
                } else {
                    infinite += 1;
                }
            }
            for &(k, a) in coefs {
                if a.abs() < MIN_COEF {
                    continue;
                }
                let own = contribution(k, a, &lb, &ub);
                let rest = match (own.is_finite(), infinite) {
                    (true, 0) => finite_sum - own,
                    (false, 1) => finite_sum,
                    _ => continue,
                };
                let bound = (beta - rest) / a;
                if a > 0.0 {
                    let new_ub = if integer[k] { (bound + IMPROVEMENT).floor() } else { bound };
                    if new_ub < ub[k] - IMPROVEMENT {
                        ub[k] = new_ub;
                        changed = true;
                    }
                } else {
                    let new_lb = if integer[k] { (bound - IMPROVEMENT).ceil() } else { bound };
                    if new_lb > lb[k] + IMPROVEMENT {
                        lb[k] = new_lb;
                        changed = true;
                    }
                }
            }
        }
        check_consistent(&lb, &ub)?;
        if !changed {
            break;
        }
    }
    Ok((lb, ub))
}

fn check_consistent(lb: &[f64], ub: &[f64]) -> Result<()> {
    for k in 0..lb.len() {
        if lb[k] > ub[k] + IMPROVEMENT {
            return Err(Error::Infeasible(format!(
                "bounds of variable {k} crossed: [{}, {}]",
                lb[k], ub[k]
            )));
        }
    }
    Ok(())
}
