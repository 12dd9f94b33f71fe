use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::Problem;

const MAX_SWEEPS: usize = 100;

/// Alternating exact minimization over the two sides of a bipartite binary
/// quadratic objective.
///
/// With one side fixed the objective is separable in the other side (using
/// `x^2 = x`), so each variable is set to 1 exactly when its effective
/// coefficient `d_i + q_ii + sum_j q_ij x_j` is negative (a zero
/// coefficient keeps the current value). Sides alternate until nothing
/// changes or 100 sweeps pass. Constraints are ignored.
pub fn bipartite_qubo_improve(problem: &Problem, x0: &[f64]) -> Result<Vec<f64>> {
    let n = problem.n();
    if x0.len() != n {
        return Err(Error::Dimension { expected: n, got: x0.len() });
    }
    if !problem.is_all_binary() {
        return Err(Error::Unsupported("bipartite QUBO needs binary variables".into()));
    }
    let mut diag = problem.obj_linear.clone();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for t in &problem.obj_terms {
        if t.i == t.j {
            diag[t.i] += t.coef;
        } else {
            adj[t.i].push((t.j, t.coef));
            adj[t.j].push((t.i, t.coef));
        }
    }

    let mut side = vec![usize::MAX; n];
    for root in 0..n {
        if side[root] != usize::MAX {
            continue;
        }
        side[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if side[v] == usize::MAX {
                    side[v] = 1 - side[u];
                    queue.push_back(v);
                } else if side[v] == side[u] {
                    return Err(Error::NotBipartite);
                }
            }
        }
    }

    let mut x: Vec<f64> = x0.iter().map(|&v| if v > 0.5 { 1.0 } else { 0.0 }).collect();
    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for part in [0, 1] {
            let before = problem.objective_unchecked(&x);
            let updates: Vec<(usize, f64)> = (0..n)
                .filter(|&i| side[i] == part)
                .map(|i| {
                    let coef = diag[i] + adj[i].iter().map(|&(j, q)| q * x[j]).sum::<f64>();
                    let v = if coef < 0.0 {
                        1.0
                    } else if coef > 0.0 {
                        0.0
                    } else {
                        x[i]
                    };
                    (i, v)
                })
                .collect();
            for (i, v) in updates {
                if x[i] != v {
                    x[i] = v;
                    changed = true;
                }
            }
            debug_assert!(problem.objective_unchecked(&x) <= before + 1e-9 * (1.0 + before.abs()));
        }
        if !changed {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarKind;

    fn binaries(n: usize) -> Problem {
        let mut p = Problem::new("q", n);
        for k in 0..n {
            p.set_var(k, VarKind::Binary, 0.0, 1.0);
        }
        p
    }

    #[test]
    fn hand_trace() {
        let mut p = binaries(2);
        p.add_obj_term(0, 1, 1.0);
        p.obj_linear = vec![-0.6, -0.6];
        let x = bipartite_qubo_improve(&p, &[1.0, 1.0]).unwrap();
        assert_eq!(x, vec![0.0, 1.0]);
        assert!((p.eval_objective(&x).unwrap() + 0.6).abs() < 1e-12);
        assert_eq!(bipartite_qubo_improve(&p, &x).unwrap(), x);
    }

    #[test]
    fn empty_objective_is_fixed_point() {
        let p = binaries(3);
        for x in [[0.0, 0.0, 0.0], [1.0, 0.0, 1.0]] {
            assert_eq!(bipartite_qubo_improve(&p, &x).unwrap(), x.to_vec());
        }
    }

    #[test]
    fn odd_cycle_rejected() {
        let mut p = binaries(3);
        p.set_obj_terms(vec![
            crate::model::Term::new(0, 1, 1.0),
            crate::model::Term::new(1, 2, 1.0),
            crate::model::Term::new(0, 2, 1.0),
        ]);
        assert!(matches!(bipartite_qubo_improve(&p, &[0.0; 3]), Err(Error::NotBipartite)));
    }
}
