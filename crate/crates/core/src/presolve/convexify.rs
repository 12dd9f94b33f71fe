use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Problem;

const MAX_DIM: usize = 2000;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

impl Spectrum {
    /// `V diag(lambda) V^T`.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let n = self.eigenvalues.len();
        let mut q = vec![vec![0.0; n]; n];
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    q[i][j] += lambda * v[i] * v[j];
                }
            }
        }
        q
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps rotate away every off-diagonal entry in row order until the
/// largest remaining one is at most `1e-10 * ||Q||_F`.
pub fn eigen_symmetric(q: &[Vec<f64>]) -> Result<Spectrum> {
    let n = q.len();
    if n > MAX_DIM {
        return Err(Error::InvalidInput(format!("matrix of order {n} exceeds {MAX_DIM}")));
    }
    let scale = q.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        if q[i].len() != n {
            return Err(Error::Dimension { expected: n, got: q[i].len() });
        }
        for j in 0..i {
            let deviation = (q[i][j] - q[j][i]).abs();
            if deviation > 1e-9 * scale {
                return Err(Error::NotSymmetric { row: i, col: j, deviation });
            }
        }
    }

    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (q[i][j] + q[j][i])).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frobenius = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-10 * frobenius;

    let mut sweeps = 0;
    loop {
        let off = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(a[i][j].abs()));
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numerical(format!("Jacobi stalled at off-diagonal {off:e}")));
        }
        sweeps += 1;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[p][r];
                if apr.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, r, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&k| a[k][k]).collect(),
        eigenvectors: order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect(),
        sweeps,
    })
}

/// `A <- J^T A J`, `V <- V J` for the rotation in the `(p, r)` plane.
fn rotate(a: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, r: usize, c: f64, s: f64) {
    let n = a.len();
    for k in 0..n {
        let (akp, akr) = (a[k][p], a[k][r]);
        a[k][p] = c * akp - s * akr;
        a[k][r] = s * akp + c * akr;
    }
    for k in 0..n {
        let (apk, ark) = (a[p][k], a[r][k]);
        a[p][k] = c * apk - s * ark;
        a[r][k] = s * apk + c * ark;
    }
    for row in v.iter_mut() {
        let (vp, vr) = (row[p], row[r]);
        row[p] = c * vp - s * vr;
        row[r] = s * vp + c * vr;
    }
}

/// `ceil(ell * n)`, guarded against `0.6 * 10 = 6.000000000000001`.
pub fn nonnegative_count(ell: f64, n: usize) -> usize {
    ((ell * n as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Shift `s` such that `Q + s I` has at least `ceil(ell * n)` nonnegative
/// eigenvalues.
pub fn convexification_shift(spectrum: &Spectrum, ell: f64) -> f64 {
    let n = spectrum.eigenvalues.len();
    let m = nonnegative_count(ell, n).min(n);
    if m == 0 {
        return 0.0;
    }
    (-spectrum.eigenvalues[n - m]).max(0.0)
}

/// Partial convexification of an all-binary objective.
///
/// Adds `s` to the diagonal of `Q` and subtracts `s / 2` from every linear
/// coefficient; `x^2 = x` on binaries makes this exact. Returns the problem
/// and `s`.
pub fn convexify_binary(problem: &Problem, ell: f64) -> Result<(Problem, f64)> {
    check_binary(problem, ell)?;
    let spectrum = eigen_symmetric(&problem.dense_objective_matrix())?;
    Ok(convexify_with_spectrum(problem, &spectrum, ell))
}

/// [`convexify_binary`] with a precomputed spectrum of the objective matrix.
pub fn convexify_with_spectrum(problem: &Problem, spectrum: &Spectrum, ell: f64) -> (Problem, f64) {
    let s = convexification_shift(spectrum, ell);
    let mut out = problem.clone();
    if s > 0.0 {
        // Q_kk = 2 q_kk under the term convention
        for k in 0..out.n() {
            out.obj_terms.push(crate::model::Term::new(k, k, s / 2.0));
            out.obj_linear[k] -= s / 2.0;
        }
        let terms = std::mem::take(&mut out.obj_terms);
        out.set_obj_terms(terms);
    }
    (out, s)
}

pub(crate) fn check_binary(problem: &Problem, ell: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&ell) {
        return Err(Error::InvalidInput(format!("ell must lie in [0, 1], got {ell}")));
    }
    if !problem.is_all_binary() {
        return Err(Error::Unsupported("convexification needs an all-binary problem".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Term, VarKind};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn small_spectra() {
        let s = eigen_symmetric(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert!(close(&s.eigenvalues, &[-2.0, 2.0], 1e-12));
        let s = eigen_symmetric(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(s.sweeps, 0);
        let d = vec![vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 0.0]];
        assert_eq!(eigen_symmetric(&d).unwrap().eigenvalues, vec![-1.0, 0.0, 3.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let q = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        assert!(matches!(eigen_symmetric(&q), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn reconstruction() {
        let q = vec![
            vec![4.0, -1.0, 2.0, 0.5],
            vec![-1.0, 0.0, 3.0, -2.0],
            vec![2.0, 3.0, -5.0, 1.0],
            vec![0.5, -2.0, 1.0, 1.0],
        ];
        let s = eigen_symmetric(&q).unwrap();
        let back = s.reconstruct();
        let fro: f64 = q.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let err: f64 = q
            .iter()
            .flatten()
            .zip(back.iter().flatten())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-8 * fro);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    fn bilinear_pair() -> Problem {
        let mut p = Problem::new("b", 2);
        p.set_var(0, VarKind::Binary, 0.0, 1.0);
        p.set_var(1, VarKind::Binary, 0.0, 1.0);
        p.add_obj_term(0, 1, 2.0);
        p
    }

    #[test]
    fn full_convexification_of_pair() {
        let p = bilinear_pair();
        let (q, s) = convexify_binary(&p, 1.0).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        let dense = q.dense_objective_matrix();
        assert!(close(&dense[0], &[2.0, 2.0], 1e-12) && close(&dense[1], &[2.0, 2.0], 1e-12));
        assert!(close(&q.obj_linear, &[-1.0, -1.0], 1e-12));
        for x in [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] {
            let diff = p.eval_objective(&x).unwrap() - q.eval_objective(&x).unwrap();
            assert!(diff.abs() < 1e-12);
        }
    }

    #[test]
    fn psd_objective_unchanged() {
        let mut p = bilinear_pair();
        p.set_obj_terms(vec![Term::new(0, 0, 1.0), Term::new(1, 1, 1.0)]);
        for ell in [0.0, 0.5, 1.0] {
            let (q, s) = convexify_binary(&p, ell).unwrap();
            assert_eq!(s, 0.0);
            assert_eq!(q, p);
        }
    }

    #[test]
    fn ell_zero_and_rounding() {
        assert_eq!(nonnegative_count(0.0, 10), 0);
        assert_eq!(nonnegative_count(0.6, 10), 6);
        assert_eq!(nonnegative_count(0.8, 12), 10);
        let (_, s) = convexify_binary(&bilinear_pair(), 0.0).unwrap();
        assert_eq!(s, 0.0);
        // half of the spectrum {-2, 2} is already nonnegative
        let (_, s) = convexify_binary(&bilinear_pair(), 0.5).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn refuses_non_binary() {
        let mut p = bilinear_pair();
        p.set_var(1, VarKind::Integer, 0.0, 3.0);
        assert!(matches!(convexify_binary(&p, 1.0), Err(Error::Unsupported(_))));
        assert!(convexify_binary(&bilinear_pair(), 1.5).is_err());
    }
}
