use serde::{Deserialize, Serialize};

use crate::bnb::{HeuristicToggles, IncumbentEvent};
use crate::error::{Error, Result};
use crate::metrics::{primal_integral, IncumbentTrace, InstanceSummary};
use crate::model::Problem;
use crate::portfolio::{GridKind, PortfolioConfig, PortfolioOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Feasible,
    NoSolution,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEvent {
    pub time: f64,
    /// Instance's own sense.
    pub objective: f64,
}

/// The configuration a run used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub time_limit: f64,
    pub workers: usize,
    pub grid: Option<GridKind>,
    /// Per worker.
    pub p: Vec<f64>,
    pub ell: Vec<Option<f64>>,
    pub seeds: Vec<u64>,
    pub fw_iter: usize,
    pub restart: usize,
    pub heuristics: HeuristicToggles,
    pub reference: Option<f64>,
}

impl ConfigEcho {
    fn from_config(config: &PortfolioConfig) -> Self {
        ConfigEcho {
            time_limit: config.time_limit,
            workers: config.workers,
            grid: None,
            p: vec![],
            ell: vec![],
            seeds: vec![],
            fw_iter: config.base.fw_max_iter,
            restart: config.base.restart_interval,
            heuristics: config.base.heuristics.clone(),
            reference: config.reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetrics {
    pub ttf: Option<f64>,
    /// Percent; only with a reference value.
    pub gap: Option<f64>,
    pub primal_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub nodes: usize,
    pub restarts: usize,
    pub elapsed: f64,
    pub artificial_bounds: bool,
}

/// Machine-readable outcome of one `solve` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub status: RunStatus,
    /// Best objective, instance's own sense.
    pub objective: Option<f64>,
    pub solution: Option<Vec<f64>>,
    pub events: Vec<ReportEvent>,
    pub config: ConfigEcho,
    pub metrics: ReportMetrics,
    pub stats: ReportStats,
    pub error: Option<String>,
}

/// Seconds rounded to milliseconds.
pub fn millis(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

impl RunReport {
    /// Builds the report from minimization-form `events`.
    pub fn from_events(problem: &Problem, events: &[IncumbentEvent], config: &PortfolioConfig) -> Self {
        let events: Vec<ReportEvent> = events
            .iter()
            .map(|e| ReportEvent {
                time: millis(e.time),
                objective: problem.to_original_sense(e.value),
            })
            .collect();
        let trace = IncumbentTrace::new(
            events.iter().map(|e| (e.time, e.objective)).collect(),
            config.time_limit,
            config.reference,
        );
        let found = !events.is_empty();
        RunReport {
            instance: problem.name.clone(),
            status: if found { RunStatus::Feasible } else { RunStatus::NoSolution },
            objective: trace.best(),
            solution: None,
            metrics: ReportMetrics {
                ttf: trace.ttf(),
                gap: trace.final_gap().map(|g| 100.0 * g),
                primal_integral: primal_integral(&trace),
            },
            events,
            config: ConfigEcho::from_config(config),
            stats: ReportStats {
                nodes: 0,
                restarts: 0,
                elapsed: 0.0,
                artificial_bounds: false,
            },
            error: None,
        }
    }

    pub fn from_outcome(problem: &Problem, outcome: &PortfolioOutcome, config: &PortfolioConfig) -> Self {
        let mut report = Self::from_events(problem, &outcome.events, config);
        report.solution = outcome.best.as_ref().map(|(_, x)| x.clone());
        report.config.grid = Some(outcome.grid);
        report.config.p = outcome.configs.iter().map(|c| c.p).collect();
        report.config.ell = outcome.configs.iter().map(|c| c.ell).collect();
        report.config.seeds = outcome.configs.iter().map(|c| c.seed).collect();
        report.stats = ReportStats {
            nodes: outcome.traces.iter().map(|t| t.nodes).sum(),
            restarts: outcome.traces.iter().map(|t| t.restarts).sum(),
            elapsed: millis(outcome.elapsed),
            artificial_bounds: outcome.artificial_bounds,
        };
        report
    }

    /// Report for a run that stopped on an error. Proven infeasibility is
    /// reported as `no_solution`, with the reason kept in `error`.
    pub fn failure(instance: &str, config: &PortfolioConfig, error: &Error) -> Self {
        let status = match error {
            Error::Infeasible(_) => RunStatus::NoSolution,
            _ => RunStatus::Error,
        };
        RunReport {
            instance: instance.to_string(),
            status,
            objective: None,
            solution: None,
            events: vec![],
            config: ConfigEcho::from_config(config),
            metrics: ReportMetrics {
                ttf: None,
                gap: config.reference.map(|_| 100.0),
                primal_integral: config.time_limit,
            },
            stats: ReportStats {
                nodes: 0,
                restarts: 0,
                elapsed: 0.0,
                artificial_bounds: false,
            },
            error: Some(error.to_string()),
        }
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            name: self.instance.clone(),
            found: self.status == RunStatus::Feasible,
            ttf: self.metrics.ttf,
            gap: self.metrics.gap,
            primal_integral: self.metrics.primal_integral,
        }
    }
}

/// Pretty-printed JSON; fields in declaration order.
pub fn write_report(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("reports contain only plain data")
}

pub fn read_report(text: &str) -> Result<RunReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ObjSense;

    fn config(limit: f64, reference: Option<f64>) -> PortfolioConfig {
        PortfolioConfig {
            time_limit: limit,
            reference,
            ..PortfolioConfig::default()
        }
    }

    fn ev(time: f64, value: f64) -> IncumbentEvent {
        IncumbentEvent { time, value }
    }

    #[test]
    fn empty_trace() {
        let p = Problem::new("empty", 1);
        let r = RunReport::from_events(&p, &[], &config(300.0, None));
        assert_eq!(r.status, RunStatus::NoSolution);
        assert_eq!(r.metrics.primal_integral, 300.0);
        assert_eq!((r.objective, r.metrics.ttf), (None, None));
    }

    #[test]
    fn ttf_and_gap() {
        let p = Problem::new("one", 1);
        let r = RunReport::from_events(&p, &[ev(2.0, 12.0)], &config(10.0, Some(10.0)));
        assert_eq!(r.metrics.ttf, Some(2.0));
        assert_eq!(r.status, RunStatus::Feasible);
        assert!((r.metrics.gap.unwrap() - 100.0 * 2.0 / 12.0).abs() < 1e-12);
        assert!((r.metrics.primal_integral - (2.0 + 8.0 * 2.0 / 12.0)).abs() < 1e-12);
    }

    #[test]
    fn maximization_events_improve_upward() {
        let mut p = Problem::new("max", 1);
        p.sense = ObjSense::Maximize;
        let r = RunReport::from_events(&p, &[ev(0.12345, -1.0), ev(1.0, -3.0)], &config(5.0, None));
        let objs: Vec<f64> = r.events.iter().map(|e| e.objective).collect();
        assert_eq!(objs, vec![1.0, 3.0]);
        assert_eq!(r.events[0].time, 0.123);
        assert_eq!(r.objective, Some(3.0));
    }

    #[test]
    fn infeasibility_is_not_an_error() {
        let c = config(1.0, None);
        let r = RunReport::failure("x", &c, &Error::Infeasible("rows".into()));
        assert_eq!((r.status, r.metrics.primal_integral), (RunStatus::NoSolution, 1.0));
        let r = RunReport::failure("x", &c, &Error::Unsupported("code".into()));
        assert_eq!(r.status, RunStatus::Error);
    }

    #[test]
    fn json_round_trip_and_field_order() {
        let p = Problem::new("rt", 1);
        let r = RunReport::from_events(&p, &[ev(1.0, 4.0), ev(2.5, 3.0)], &config(5.0, Some(3.0)));
        let text = write_report(&r);
        assert_eq!(read_report(&text).unwrap(), r);
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("instance") < pos("status") && pos("status") < pos("objective") && pos("events") < pos("config"));
        assert_eq!(write_report(&r), text);
        assert!(read_report("{").is_err());
    }
}
