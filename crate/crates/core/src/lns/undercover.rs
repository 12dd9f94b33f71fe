use crate::error::{Error, Result};
use crate::lmo::{mip_lmo, LinearRow, MipSettings, MipStatus, Region, RowSense};
use crate::model::{ConSense, Problem, Term};
use crate::util::StopSignal;

/// Variables joined by bilinear terms of the objective or of a quadratic
/// row. Variables with square terms are forced into every cover.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearityGraph {
    pub n: usize,
    /// Sorted, deduplicated, `i < j`.
    pub edges: Vec<(usize, usize)>,
    pub forced: Vec<bool>,
}

impl NonlinearityGraph {
    pub fn from_problem(problem: &Problem) -> Self {
        let n = problem.n();
        let mut edges = Vec::new();
        let mut forced = vec![false; n];
        let terms = problem
            .obj_terms
            .iter()
            .chain(problem.constraints.iter().flat_map(|c| c.terms.iter()));
        for t in terms {
            if t.i == t.j {
                forced[t.i] = true;
            } else {
                edges.push((t.i, t.j));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        NonlinearityGraph { n, edges, forced }
    }

    pub fn is_cover(&self, cover: &[bool]) -> bool {
        self.edges.iter().all(|&(i, j)| cover[i] || cover[j])
            && self.forced.iter().zip(cover).all(|(&f, &c)| !f || c)
    }

    /// Cover by repeatedly taking the vertex touching the most uncovered
    /// edges (lowest index on ties).
    pub fn greedy_cover(&self) -> Vec<bool> {
        let mut cover = self.forced.clone();
        loop {
            let mut degree = vec![0usize; self.n];
            for &(i, j) in &self.edges {
                if !cover[i] && !cover[j] {
                    degree[i] += 1;
                    degree[j] += 1;
                }
            }
            let mut best = None;
            for (k, &d) in degree.iter().enumerate() {
                if d > 0 && best.map_or(true, |(_, bd)| d > bd) {
                    best = Some((k, d));
                }
            }
            match best {
                Some((k, _)) => cover[k] = true,
                None => return cover,
            }
        }
    }
}

/// Minimum vertex cover via the internal MIP; the greedy cover is used if
/// the MIP does not finish. Returns the cover and whether it is optimal.
pub fn vertex_cover(graph: &NonlinearityGraph, settings: &MipSettings, stop: &StopSignal) -> (Vec<bool>, bool) {
    if graph.edges.is_empty() {
        return (graph.forced.clone(), true);
    }
    let n = graph.n;
    let lb: Vec<f64> = graph.forced.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    let rows = graph
        .edges
        .iter()
        .map(|&(i, j)| LinearRow::ge(vec![(i, 1.0), (j, 1.0)], 1.0))
        .collect();
    let Ok(region) = Region::new(lb, vec![1.0; n], rows, vec![true; n]) else {
        return (graph.greedy_cover(), false);
    };
    let res = mip_lmo(&vec![1.0; n], &region, settings, stop);
    match (res.status, res.x) {
        (MipStatus::Optimal, Some(y)) => (y.iter().map(|&v| v > 0.5).collect(), true),
        _ => (graph.greedy_cover(), false),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UndercoverResult {
    pub cover: Vec<bool>,
    pub exact_cover: bool,
    /// Optimal point of the linearized problem, if it was feasible.
    pub point: Option<Vec<f64>>,
}

/// Adds `sum of terms` to (`coefs`, `constant`) with the covered variables
/// fixed to `values`.
fn linearize(terms: &[Term], fixed: &[bool], values: &[f64], coefs: &mut [f64], constant: &mut f64) -> Result<()> {
    for t in terms {
        match (fixed[t.i], fixed[t.j]) {
            (true, true) => *constant += t.coef * values[t.i] * values[t.j],
            (true, false) => coefs[t.j] += t.coef * values[t.i],
            (false, true) => coefs[t.i] += t.coef * values[t.j],
            (false, false) => {
                return Err(Error::Numerical(format!(
                    "term {}*x{}*x{} has two free variables after fixing",
                    t.coef, t.i, t.j
                )))
            }
        }
    }
    Ok(())
}

/// Fixes a vertex cover of the nonlinearity graph to the values of
/// `reference` (integers rounded, clamped to bounds) and solves the
/// remaining mixed-integer linear problem exactly with the internal MIP.
pub fn undercover(problem: &Problem, reference: &[f64], settings: &MipSettings, stop: &StopSignal) -> Result<UndercoverResult> {
    let n = problem.n();
    if reference.len() != n {
        return Err(Error::Dimension { expected: n, got: reference.len() });
    }
    let graph = NonlinearityGraph::from_problem(problem);
    let (cover, exact_cover) = vertex_cover(&graph, settings, stop);
    debug_assert!(graph.is_cover(&cover));

    let mut lb = problem.lb.clone();
    let mut ub = problem.ub.clone();
    let mut values = reference.to_vec();
    for k in (0..n).filter(|&k| cover[k]) {
        let v = if problem.kinds[k].is_integral() { reference[k].round() } else { reference[k] };
        let v = v.clamp(problem.lb[k], problem.ub[k]);
        values[k] = v;
        lb[k] = v;
        ub[k] = v;
    }

    let mut direction = problem.obj_linear.clone();
    let mut obj_const = 0.0;
    linearize(&problem.obj_terms, &cover, &values, &mut direction, &mut obj_const)?;

    let mut rows = Vec::with_capacity(problem.constraints.len());
    for c in &problem.constraints {
        let mut dense = vec![0.0; n];
        for &(k, a) in &c.linear {
            dense[k] += a;
        }
        let mut constant = c.constant;
        linearize(&c.terms, &cover, &values, &mut dense, &mut constant)?;
        let coefs: Vec<(usize, f64)> = dense
            .into_iter()
            .enumerate()
            .filter(|&(_, a)| a != 0.0)
            .collect();
        let row = match c.sense {
            ConSense::Le => LinearRow::le(coefs, -constant),
            ConSense::Ge => LinearRow::ge(coefs, -constant),
            ConSense::Eq => LinearRow::eq(coefs, -constant),
        };
        // Rows without free variables are checked here instead of by the LP.
        if row.coefs.is_empty() {
            let slack = match row.sense {
                RowSense::Le => row.rhs,
                RowSense::Eq => -row.rhs.abs(),
            };
            if slack < -1e-9 {
                return Ok(UndercoverResult { cover, exact_cover, point: None });
            }
            continue;
        }
        rows.push(row);
    }

    let region = Region::new(lb, ub, rows, problem.integer_mask())?;
    let res = mip_lmo(&direction, &region, settings, stop);
    let point = match res.status {
        MipStatus::Optimal | MipStatus::TimedOut => res.x,
        _ => None,
    };
    Ok(UndercoverResult { cover, exact_cover, point })
}
