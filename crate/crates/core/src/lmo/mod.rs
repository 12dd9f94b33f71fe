//! Linear minimization oracles over the mixed-integer hull of a polyhedral
//! region.
//!
//! Three paths are available:
//!
//! * [`box_lmo`], the sign rule for regions without linear rows;
//! * [`solve_lp`] / [`mip_lmo`], a bounded-variable simplex and a depth-first
//!   branch-and-bound on top of it for regions with rows;
//! * [`VertexCache::lazy_lookup`], which reuses previously computed vertices
//!   when they are good enough for the current iterate.
//!
//! [`Lmo`] bundles the three behind one entry point.

mod cache;
mod mip;
mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ConSense, Problem};
use crate::util::StopSignal;

pub use cache::VertexCache;
pub use mip::{mip_lmo, MipResult, MipSettings, MipStatus};
pub(crate) use mip::most_fractional;
pub use simplex::{solve_lp, LpSolution, LpStatus};

/// Feasibility tolerance for rows when checking region membership.
pub const ROW_TOL: f64 = 1e-7;
/// Distance to the nearest integer accepted as integral.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowSense {
    Le,
    Eq,
}

/// `coefs . x (<= | =) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRow {
    pub coefs: Vec<(usize, f64)>,
    pub rhs: f64,
    pub sense: RowSense,
}

impl LinearRow {
    pub fn le(coefs: Vec<(usize, f64)>, rhs: f64) -> Self {
        LinearRow {
            coefs,
            rhs,
            sense: RowSense::Le,
        }
    }

    pub fn ge(coefs: Vec<(usize, f64)>, rhs: f64) -> Self {
        LinearRow {
            coefs: coefs.into_iter().map(|(k, a)| (k, -a)).collect(),
            rhs: -rhs,
            sense: RowSense::Le,
        }
    }

    pub fn eq(coefs: Vec<(usize, f64)>, rhs: f64) -> Self {
        LinearRow {
            coefs,
            rhs,
            sense: RowSense::Eq,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(k, a)| a * x[k]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        let r = self.activity(x) - self.rhs;
        match self.sense {
            RowSense::Le => r.max(0.0),
            RowSense::Eq => r.abs(),
        }
    }
}

/// Bounds, linear rows and an integrality mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub rows: Vec<LinearRow>,
    pub integer: Vec<bool>,
}

impl Region {
    /// Integer bounds are rounded inward. All bounds must be finite.
    pub fn new(lb: Vec<f64>, ub: Vec<f64>, rows: Vec<LinearRow>, integer: Vec<bool>) -> Result<Self> {
        let n = lb.len();
        if ub.len() != n || integer.len() != n {
            return Err(Error::InvalidInput("region vectors have different lengths".into()));
        }
        for row in &rows {
            if let Some(&(k, _)) = row.coefs.iter().find(|&&(k, _)| k >= n) {
                return Err(Error::InvalidInput(format!("row references variable {k} >= {n}")));
            }
        }
        let mut region = Region {
            lb,
            ub,
            rows,
            integer,
        };
        for k in 0..n {
            if !region.lb[k].is_finite() || !region.ub[k].is_finite() {
                return Err(Error::InvalidInput(format!("variable {k} has an infinite bound")));
            }
            if region.integer[k] {
                region.lb[k] = (region.lb[k] - INT_TOL).ceil();
                region.ub[k] = (region.ub[k] + INT_TOL).floor();
            }
        }
        Ok(region)
    }

    /// Linear constraints of `problem` become rows, quadratic ones are left
    /// out. Requires finite bounds.
    pub fn from_problem(problem: &Problem) -> Result<Self> {
        let rows = problem
            .constraints
            .iter()
            .filter(|c| c.is_linear())
            .map(|c| {
                let coefs = c.linear.clone();
                match c.sense {
                    ConSense::Le => LinearRow::le(coefs, -c.constant),
                    ConSense::Ge => LinearRow::ge(coefs, -c.constant),
                    ConSense::Eq => LinearRow::eq(coefs, -c.constant),
                }
            })
            .collect();
        Region::new(
            problem.lb.clone(),
            problem.ub.clone(),
            rows,
            problem.integer_mask(),
        )
    }

    pub fn n(&self) -> usize {
        self.lb.len()
    }

    pub fn has_rows(&self) -> bool {
        !self.rows.is_empty()
    }

    /// Same rows and integrality, different bounds.
    pub fn with_bounds(&self, lb: Vec<f64>, ub: Vec<f64>) -> Region {
        let mut r = Region {
            lb,
            ub,
            rows: self.rows.clone(),
            integer: self.integer.clone(),
        };
        for k in 0..r.n() {
            if r.integer[k] {
                r.lb[k] = (r.lb[k] - INT_TOL).ceil();
                r.ub[k] = (r.ub[k] + INT_TOL).floor();
            }
        }
        r
    }

    pub fn bounds_consistent(&self) -> bool {
        self.lb.iter().zip(&self.ub).all(|(l, u)| l <= u)
    }

    pub fn max_row_violation(&self, x: &[f64]) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.violation(x)))
    }

    /// Bounds and rows within `tol` (integrality is not checked).
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n()
            && (0..self.n()).all(|k| x[k] >= self.lb[k] - tol && x[k] <= self.ub[k] + tol)
            && self.max_row_violation(x) <= tol
    }

    pub fn is_integral(&self, x: &[f64]) -> bool {
        (0..self.n()).all(|k| !self.integer[k] || (x[k] - x[k].round()).abs() <= INT_TOL)
    }
}

/// Sign rule: `lb` where the direction is positive or zero, `ub` where it is
/// negative.
pub fn box_lmo(direction: &[f64], region: &Region) -> Vec<f64> {
    direction
        .iter()
        .enumerate()
        .map(|(k, &d)| if d < 0.0 { region.ub[k] } else { region.lb[k] })
        .collect()
}

/// Vertex returned by [`Lmo::minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct LmoVertex {
    pub x: Vec<f64>,
    /// False when the MIP ran out of time without an integer point and the
    /// rows were ignored.
    pub trusted: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LmoStats {
    pub calls: usize,
    pub mip_calls: usize,
    pub lazy_hits: usize,
    pub untrusted: usize,
}

/// Per-worker oracle: box fast path, internal MIP, and the vertex cache.
#[derive(Debug, Clone)]
pub struct Lmo {
    pub cache: VertexCache,
    pub settings: MipSettings,
    pub stop: StopSignal,
    pub stats: LmoStats,
}

impl Lmo {
    pub fn new(settings: MipSettings, stop: StopSignal) -> Self {
        Lmo {
            cache: VertexCache::default(),
            settings,
            stop,
            stats: LmoStats::default(),
        }
    }

    /// Fresh oracle call. Trusted vertices are inserted into the cache.
    pub fn minimize(&mut self, direction: &[f64], region: &Region) -> Result<LmoVertex> {
        self.stats.calls += 1;
        if !region.bounds_consistent() {
            return Err(Error::Infeasible("empty bound box".into()));
        }
        let vertex = if region.has_rows() {
            self.stats.mip_calls += 1;
            let res = mip_lmo(direction, region, &self.settings, &self.stop);
            match res.status {
                MipStatus::Infeasible => return Err(Error::Infeasible("LMO region is empty".into())),
                MipStatus::Error(msg) => return Err(Error::Numerical(msg)),
                MipStatus::Optimal | MipStatus::TimedOut => match res.x {
                    Some(x) => LmoVertex { x, trusted: true },
                    None => {
                        self.stats.untrusted += 1;
                        LmoVertex {
                            x: box_lmo(direction, region),
                            trusted: false,
                        }
                    }
                },
            }
        } else {
            LmoVertex {
                x: box_lmo(direction, region),
                trusted: true,
            }
        };
        if vertex.trusted {
            self.cache.insert(&vertex.x, region);
        }
        Ok(vertex)
    }

    /// Cached vertex with `<grad, x - v> >= phi / 2`, if any.
    pub fn lazy(&mut self, gradient: &[f64], x: &[f64], phi: f64, region: &Region) -> Option<Vec<f64>> {
        let hit = self
            .cache
            .lazy_lookup(gradient, x, phi, region)
            .map(|v| v.to_vec());
        if hit.is_some() {
            self.stats.lazy_hits += 1;
        }
        hit
    }
}
