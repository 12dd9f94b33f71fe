use crate::fw::ActiveSet;
use crate::lmo::{most_fractional, INT_TOL};

/// A branch-and-bound node.
#[derive(Debug, Clone)]
pub struct Node {
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    /// Vertices inherited from the parent, already inside this node.
    pub active_set: Option<ActiveSet>,
    /// Oracle direction for the first vertex when nothing is inherited.
    pub direction: Option<Vec<f64>>,
    /// A point near which to start (the parent's relaxation point).
    pub hint: Option<Vec<f64>>,
    pub depth: usize,
    pub index: usize,
}

impl Node {
    pub fn root(lb: Vec<f64>, ub: Vec<f64>, index: usize) -> Self {
        Node {
            lb,
            ub,
            active_set: None,
            direction: None,
            hint: None,
            depth: 0,
            index,
        }
    }
}

/// Integer variable with the most fractional value (ties to the lowest
/// index), ignoring variables fixed by the node bounds.
pub fn select_branching_variable(x: &[f64], integer: &[bool], lb: &[f64], ub: &[f64]) -> Option<usize> {
    let free: Vec<bool> = (0..x.len()).map(|k| integer[k] && lb[k] < ub[k]).collect();
    most_fractional(x, &free, INT_TOL)
}

/// Splits `node` on `x_k`: the down child gets `ub_k = floor(x_k)`, the up
/// child `lb_k = ceil(x_k)`. The parent's vertices go to the child whose
/// bounds they satisfy, with weights renormalized.
pub fn branch(node: &Node, active_set: Option<&ActiveSet>, k: usize, x: &[f64], next_index: &mut usize) -> (Node, Node) {
    let (down_ub, up_lb) = (x[k].floor(), x[k].ceil());
    let mut down_parts = (Vec::new(), Vec::new());
    let mut up_parts = (Vec::new(), Vec::new());
    if let Some(set) = active_set {
        for (v, w) in set.iter() {
            if v[k] <= down_ub + 1e-9 {
                down_parts.0.push(v.to_vec());
                down_parts.1.push(w);
            } else if v[k] >= up_lb - 1e-9 {
                up_parts.0.push(v.to_vec());
                up_parts.1.push(w);
            }
        }
    }
    let inherit = |(vs, ws): (Vec<Vec<f64>>, Vec<f64>)| {
        if vs.is_empty() {
            None
        } else {
            ActiveSet::from_weighted(vs, ws).ok()
        }
    };
    let clamp_hint = |lb: &[f64], ub: &[f64]| x.iter().enumerate().map(|(j, v)| v.clamp(lb[j], ub[j])).collect();

    let child = |lb: Vec<f64>, ub: Vec<f64>, set: Option<ActiveSet>, next_index: &mut usize| {
        *next_index += 1;
        Node {
            hint: Some(clamp_hint(&lb, &ub)),
            lb,
            ub,
            active_set: set,
            direction: None,
            depth: node.depth + 1,
            index: *next_index,
        }
    };
    let mut ub = node.ub.clone();
    ub[k] = down_ub;
    let down = child(node.lb.clone(), ub, inherit(down_parts), next_index);
    let mut lb = node.lb.clone();
    lb[k] = up_lb;
    let up = child(lb, node.ub.clone(), inherit(up_parts), next_index);
    (down, up)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartAction {
    Continue,
    /// Restart from the incumbent.
    Warm,
    /// Restart from a random oracle direction.
    Random,
}

/// Restart every `interval` nodes, alternating warm and random restarts and
/// starting with a warm one; warm restarts need an incumbent.
pub fn restart_policy(nodes: usize, interval: usize, restarts_done: usize, has_incumbent: bool) -> RestartAction {
    if interval == 0 || nodes == 0 || nodes % interval != 0 {
        RestartAction::Continue
    } else if restarts_done % 2 == 0 && has_incumbent {
        RestartAction::Warm
    } else {
        RestartAction::Random
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branching_variable() {
        let int = [true, true];
        let (lb, ub) = ([0.0; 2], [1.0; 2]);
        assert_eq!(select_branching_variable(&[0.5, 0.9], &int, &lb, &ub), Some(0));
        assert_eq!(select_branching_variable(&[1.0, 0.0], &int, &lb, &ub), None);
        assert_eq!(select_branching_variable(&[0.5, 0.0], &[false, true], &lb, &ub), None);
    }

    fn parent() -> Node {
        Node::root(vec![0.0; 2], vec![1.0; 2], 0)
    }

    #[test]
    fn partition_by_branching_coordinate() {
        let set = ActiveSet::from_weighted(vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]], vec![0.2, 0.6, 0.2])
            .unwrap();
        let mut next = 0;
        let (down, up) = branch(&parent(), Some(&set), 0, &[0.4, 0.8], &mut next);
        assert_eq!((down.ub.clone(), up.lb.clone()), (vec![0.0, 1.0], vec![1.0, 0.0]));
        let d = down.active_set.unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.vertices().iter().all(|v| v[0] == 0.0));
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(up.active_set.unwrap().vertices(), &[vec![1.0, 1.0]]);
        assert_eq!((down.depth, down.index, up.index), (1, 1, 2));
        assert_eq!(down.hint, Some(vec![0.0, 0.8]));
    }

    #[test]
    fn empty_side_starts_fresh() {
        let set = ActiveSet::from_weighted(vec![vec![1.0, 0.0], vec![1.0, 1.0]], vec![0.25, 0.75]).unwrap();
        let mut next = 0;
        let (down, up) = branch(&parent(), Some(&set), 0, &[0.4, 0.5], &mut next);
        assert!(down.active_set.is_none());
        let u = up.active_set.unwrap();
        assert_eq!(u.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn restart_rules() {
        assert_eq!(restart_policy(10, 10, 0, true), RestartAction::Warm);
        assert_eq!(restart_policy(10, 10, 0, false), RestartAction::Random);
        assert_eq!(restart_policy(9, 10, 0, true), RestartAction::Continue);
        assert_eq!(restart_policy(20, 10, 1, true), RestartAction::Random);
        assert_eq!(restart_policy(30, 10, 2, true), RestartAction::Warm);
    }
}
