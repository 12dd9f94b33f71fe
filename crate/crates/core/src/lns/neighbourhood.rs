use crate::fw::ActiveSet;
use crate::model::Problem;

/// Two values agree when they differ by at most this.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Bounds of a sub-problem around a reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbourhood {
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub fixed: Vec<bool>,
    /// Fraction of variables that agreed.
    pub agreement: f64,
}

pub fn agreement_fraction(agree: &[bool]) -> f64 {
    if agree.is_empty() {
        return 0.0;
    }
    agree.iter().filter(|&&a| a).count() as f64 / agree.len() as f64
}

/// Strict majority, decided on counts so that exactly half never fires.
fn majority(agree: &[bool]) -> bool {
    2 * agree.iter().filter(|&&a| a).count() > agree.len()
}

fn fix_value(problem: &Problem, k: usize, v: f64, lb: &[f64], ub: &[f64]) -> f64 {
    let v = if problem.kinds[k].is_integral() { v.round() + 0.0 } else { v };
    v.clamp(lb[k], ub[k])
}

/// Active-set neighbourhood: when more than half of the variables take the
/// same value at every vertex, those are fixed and the others are boxed
/// into the vertices' range (integer ranges rounded outward, then clipped
/// to `lb`/`ub`).
pub fn asens(active_set: &ActiveSet, problem: &Problem, lb: &[f64], ub: &[f64]) -> Option<Neighbourhood> {
    let vertices = active_set.vertices();
    if vertices.len() < 2 {
        return None;
    }
    let n = problem.n();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for v in vertices {
        for k in 0..n {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let agree: Vec<bool> = (0..n).map(|k| hi[k] - lo[k] <= AGREEMENT_TOL).collect();
    if !majority(&agree) {
        return None;
    }
    let mut nb_lb = lb.to_vec();
    let mut nb_ub = ub.to_vec();
    for k in 0..n {
        if agree[k] {
            let v = fix_value(problem, k, vertices[0][k], lb, ub);
            nb_lb[k] = v;
            nb_ub[k] = v;
        } else if problem.kinds[k].is_integral() {
            nb_lb[k] = lo[k].floor().clamp(lb[k], ub[k]);
            nb_ub[k] = hi[k].ceil().clamp(lb[k], ub[k]);
        } else {
            nb_lb[k] = lo[k].clamp(lb[k], ub[k]);
            nb_ub[k] = hi[k].clamp(lb[k], ub[k]);
        }
    }
    Some(Neighbourhood {
        lb: nb_lb,
        ub: nb_ub,
        agreement: agreement_fraction(&agree),
        fixed: agree,
    })
}

/// Relaxation-induced neighbourhood: variables where the incumbent and the
/// relaxation point agree are fixed to the incumbent value, provided more
/// than half of them agree. All variables are compared, continuous ones
/// included.
pub fn rins(incumbent: &[f64], relaxation: &[f64], problem: &Problem, lb: &[f64], ub: &[f64]) -> Option<Neighbourhood> {
    let n = problem.n();
    let agree: Vec<bool> = (0..n)
        .map(|k| (incumbent[k] - relaxation[k]).abs() <= AGREEMENT_TOL)
        .collect();
    if !majority(&agree) {
        return None;
    }
    let mut nb_lb = lb.to_vec();
    let mut nb_ub = ub.to_vec();
    for k in (0..n).filter(|&k| agree[k]) {
        let v = fix_value(problem, k, incumbent[k], lb, ub);
        nb_lb[k] = v;
        nb_ub[k] = v;
    }
    Some(Neighbourhood {
        lb: nb_lb,
        ub: nb_ub,
        agreement: agreement_fraction(&agree),
        fixed: agree,
    })
}
