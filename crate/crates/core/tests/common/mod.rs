//! Instance generators and an enumeration oracle that evaluates models from
//! their raw data, independently of the library's evaluation code.
#![allow(dead_code)]

use miqfw::model::{ConSense, Problem, QuadConstraint, Term, VarKind};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Calls `visit` on every integer point of the box, last coordinate fastest.
pub fn for_each_point(lb: &[i64], ub: &[i64], mut visit: impl FnMut(&[f64])) {
    let n = lb.len();
    if lb.iter().zip(ub).any(|(l, u)| l > u) {
        return;
    }
    let mut x: Vec<f64> = lb.iter().map(|&v| v as f64).collect();
    loop {
        visit(&x);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if x[k] < ub[k] as f64 {
                x[k] += 1.0;
                break;
            }
            x[k] = lb[k] as f64;
        }
    }
}

pub fn box_size(lb: &[i64], ub: &[i64]) -> f64 {
    lb.iter().zip(ub).map(|(l, u)| (u - l + 1) as f64).product()
}

/// `sum c x_i x_j` straight from term data.
pub fn terms_value(terms: &[Term], x: &[f64]) -> f64 {
    terms.iter().map(|t| t.coef * x[t.i] * x[t.j]).sum()
}

/// Objective (minimization form) from the model's fields.
pub fn objective(p: &Problem, x: &[f64]) -> f64 {
    let lin: f64 = p.obj_linear.iter().zip(x).map(|(a, b)| a * b).sum();
    terms_value(&p.obj_terms, x) + lin + p.obj_constant
}

/// Largest violation of rows and bounds, from the model's fields.
pub fn violation(p: &Problem, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..p.n() {
        worst = worst.max(p.lb[k] - x[k]).max(x[k] - p.ub[k]);
    }
    for c in &p.constraints {
        let lin: f64 = c.linear.iter().map(|&(k, a)| a * x[k]).sum();
        let g = terms_value(&c.terms, x) + lin + c.constant;
        let v = match c.sense {
            ConSense::Le => g,
            ConSense::Ge => -g,
            ConSense::Eq => g.abs(),
        };
        worst = worst.max(v);
    }
    worst
}

pub fn integral(p: &Problem, x: &[f64], tol: f64) -> bool {
    (0..p.n()).all(|k| !p.kinds[k].is_integral() || (x[k] - x[k].round()).abs() <= tol)
}

/// Integer bounds of a pure-integer model.
pub fn int_bounds(p: &Problem) -> (Vec<i64>, Vec<i64>) {
    (
        p.lb.iter().map(|v| v.ceil() as i64).collect(),
        p.ub.iter().map(|v| v.floor() as i64).collect(),
    )
}

/// Exact optimum of a pure-integer model by enumeration: `(value, point)`,
/// `None` when no point satisfies the rows within `tol`.
pub fn brute_force(p: &Problem, tol: f64) -> Option<(f64, Vec<f64>)> {
    let (lb, ub) = int_bounds(p);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_point(&lb, &ub, |x| {
        if violation(p, x) <= tol {
            let v = objective(p, x);
            if best.as_ref().map_or(true, |(b, _)| v < *b) {
                best = Some((v, x.to_vec()));
            }
        }
    });
    best
}

/// Dense random quadratic objective with N(0,1) coefficients.
pub fn dense_objective(p: &mut Problem, rng: &mut ChaCha8Rng) {
    let n = p.n();
    for i in 0..n {
        for j in i..n {
            let c = normal(rng);
            p.add_obj_term(i, j, c);
        }
        p.obj_linear[i] = normal(rng);
    }
}

/// Random quadratic row over a few variables that `anchor` satisfies.
pub fn quadratic_row(
    name: &str,
    n: usize,
    anchor: &[f64],
    sense: ConSense,
    rng: &mut ChaCha8Rng,
) -> QuadConstraint {
    let mut terms = Vec::new();
    let count = rng.random_range(1..=3);
    for _ in 0..count {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        terms.push(Term::new(i, j, rng.random_range(-3..=3) as f64));
    }
    if terms.iter().all(|t| t.coef == 0.0) {
        terms[0].coef = 1.0;
    }
    let mut linear = Vec::new();
    for k in 0..n {
        if rng.random_bool(0.4) {
            linear.push((k, rng.random_range(-3..=3) as f64));
        }
    }
    let lin: f64 = linear.iter().map(|&(k, a)| a * anchor[k]).sum();
    let g = terms_value(&terms, anchor) + lin;
    let slack = match sense {
        ConSense::Eq => 0.0,
        _ => rng.random_range(0..=2) as f64,
    };
    let rhs = match sense {
        ConSense::Ge => g - slack,
        _ => g + slack,
    };
    QuadConstraint::new(name, terms, linear, -rhs, sense)
}

/// Random linear row that `anchor` satisfies.
pub fn linear_row(name: &str, n: usize, anchor: &[f64], sense: ConSense, rng: &mut ChaCha8Rng) -> QuadConstraint {
    let mut linear = Vec::new();
    for k in 0..n {
        if rng.random_bool(0.6) {
            linear.push((k, rng.random_range(-3..=3) as f64));
        }
    }
    if linear.is_empty() {
        linear.push((rng.random_range(0..n), 1.0));
    }
    let g: f64 = linear.iter().map(|&(k, a)| a * anchor[k]).sum();
    let slack = match sense {
        ConSense::Eq => 0.0,
        _ => rng.random_range(0..=2) as f64,
    };
    let rhs = match sense {
        ConSense::Ge => g - slack,
        _ => g + slack,
    };
    QuadConstraint::new(name, vec![], linear, -rhs, sense)
}

/// Integer variables with small boxes; the enumeration stays below `cap`.
pub fn integer_box(n: usize, cap: f64, rng: &mut ChaCha8Rng) -> Problem {
    let mut p = Problem::new("gen", n);
    for k in 0..n {
        if rng.random_bool(0.5) {
            p.set_var(k, VarKind::Binary, 0.0, 1.0);
        } else {
            let lb = rng.random_range(-2..=0) as f64;
            let ub = lb + rng.random_range(1..=3) as f64;
            p.set_var(k, VarKind::Integer, lb, ub);
        }
    }
    // shrink the widest boxes until enumerable
    loop {
        let (lb, ub) = int_bounds(&p);
        if box_size(&lb, &ub) <= cap {
            break;
        }
        let k = (0..n).max_by_key(|&k| ub[k] - lb[k]).unwrap();
        p.ub[k] -= 1.0;
        if p.ub[k] - p.lb[k] <= 1.0 && p.lb[k] == 0.0 {
            p.kinds[k] = VarKind::Binary;
        }
    }
    p
}

/// A random integer point of the box.
pub fn random_point(p: &Problem, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..p.n())
        .map(|k| rng.random_range(p.lb[k] as i64..=p.ub[k] as i64) as f64)
        .collect()
}
