//! Frank-Wolfe based primal heuristic for mixed-integer quadratically
//! constrained quadratic programs.
//!
//! Quadratic rows are relaxed into a smooth power penalty, and the rest is
//! minimized over the mixed-integer hull of the linear rows with blended
//! pairwise conditional gradients, driven by a branch-and-bound tree that
//! never prunes. Every integer point the search touches is checked against
//! the original model. The output is a trace of improving feasible
//! solutions.
//!
//! ```
//! use std::time::Duration;
//! use miqfw::bnb::{solve_problem, SolverConfig};
//! use miqfw::model::{ConSense, Problem, QuadConstraint, Term, VarKind};
//!
//! // max x0 + x1 + x2  s.t.  x0 x1 + x2^2 <= 2, integers in [0, 2]
//! let mut p = Problem::new("demo", 3);
//! for k in 0..3 {
//!     p.set_var(k, VarKind::Integer, 0.0, 2.0);
//! }
//! p.obj_linear = vec![-1.0; 3];
//! p.add_constraint(QuadConstraint::new(
//!     "q",
//!     vec![Term::new(0, 1, 1.0), Term::new(2, 2, 1.0)],
//!     vec![],
//!     -2.0,
//!     ConSense::Le,
//! ));
//!
//! let config = SolverConfig { time_limit: Duration::from_secs(5), node_limit: Some(200), ..Default::default() };
//! let trace = solve_problem(&p, &config).unwrap();
//! let x = trace.best_point.unwrap();
//! assert!(p.check_feasibility(&x, 1e-6, 1e-6).feasible);
//! ```
//!
//! Start with [`portfolio::run_portfolio`] for multi-worker runs, or
//! [`bnb::solve_problem`] for a single worker. The modules follow the
//! pipeline: [`ingest`] reads instances, [`presolve`] tightens and
//! reformulates them, [`penalty`] builds the smooth objective, [`lmo`] and
//! [`fw`] optimize it, [`bnb`] and [`lns`] search, and [`metrics`] scores
//! the result. [`oracle`] enumerates small instances exactly, for testing.

pub mod bnb;
pub mod error;
pub mod fw;
pub mod ingest;
pub mod lmo;
pub mod lns;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod penalty;
pub mod portfolio;
pub mod presolve;
pub mod util;

pub use error::{Error, Result};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/modelling.md")]
    mod modelling {}
    #[doc = include_str!("../../../book/src/penalty.md")]
    mod penalty {}
    #[doc = include_str!("../../../book/src/frank-wolfe.md")]
    mod frank_wolfe {}
    #[doc = include_str!("../../../book/src/branch-and-bound.md")]
    mod branch_and_bound {}
    #[doc = include_str!("../../../book/src/presolve.md")]
    mod presolve {}
    #[doc = include_str!("../../../book/src/heuristics.md")]
    mod heuristics {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
