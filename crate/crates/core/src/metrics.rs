//! Benchmark metrics: primal gap, primal integral, time to first feasible
//! solution and the shifted geometric mean used to average them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shift used when averaging across instances.
pub const DEFAULT_SHIFT: f64 = 1.0;

/// `|tilde - star| / max(|tilde|, |star|)`, with `0` when both vanish and
/// `1` when the signs differ.
pub fn primal_gap(tilde: f64, star: f64) -> f64 {
    if tilde == 0.0 && star == 0.0 {
        return 0.0;
    }
    if tilde * star < 0.0 {
        return 1.0;
    }
    ((tilde - star).abs() / tilde.abs().max(star.abs())).min(1.0)
}

/// [`primal_gap`] with `1` for a missing solution.
pub fn gap_or_one(tilde: Option<f64>, star: f64) -> f64 {
    tilde.map_or(1.0, |t| primal_gap(t, star))
}

/// Incumbent events `(time, objective)` of one run, in the instance's own
/// objective sense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncumbentTrace {
    pub events: Vec<(f64, f64)>,
    pub horizon: f64,
    pub reference: Option<f64>,
}

impl IncumbentTrace {
    pub fn new(events: Vec<(f64, f64)>, horizon: f64, reference: Option<f64>) -> Self {
        IncumbentTrace {
            events,
            horizon,
            reference,
        }
    }

    pub fn best(&self) -> Option<f64> {
        self.events.last().map(|&(_, v)| v)
    }

    /// Time of the first event.
    pub fn ttf(&self) -> Option<f64> {
        self.events.first().map(|&(t, _)| t)
    }

    /// TTF, or the horizon when nothing was found.
    pub fn ttf_or_horizon(&self) -> f64 {
        self.ttf().unwrap_or(self.horizon)
    }

    /// Gap of the final incumbent, if a reference is known.
    pub fn final_gap(&self) -> Option<f64> {
        self.reference.map(|r| gap_or_one(self.best(), r))
    }
}

/// `sum_i gamma_i (t_i - t_{i-1})` over the run, gap 1 before the first
/// incumbent. Without a reference the best value in the trace is used.
pub fn primal_integral(trace: &IncumbentTrace) -> f64 {
    let horizon = trace.horizon.max(0.0);
    let Some(reference) = trace.reference.or(trace.best()) else {
        return horizon;
    };
    let mut total = 0.0;
    let mut previous = 0.0;
    let mut gap = 1.0;
    for &(t, v) in &trace.events {
        let t = t.clamp(previous, horizon);
        total += gap * (t - previous);
        previous = t;
        gap = primal_gap(v, reference);
    }
    total + gap * (horizon - previous)
}

/// `exp(mean(ln(v + shift))) - shift`.
pub fn shifted_geomean(values: &[f64], shift: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("shifted geometric mean of an empty list".into()));
    }
    if !(shift > 0.0) || values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidInput("values must be nonnegative and the shift positive".into()));
    }
    let mean_log = values.iter().map(|v| (v + shift).ln()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp() - shift)
}

/// Per-instance figures that feed the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub name: String,
    pub found: bool,
    pub ttf: Option<f64>,
    /// Percent.
    pub gap: Option<f64>,
    pub primal_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub found: usize,
    pub total: usize,
    pub ttf: Option<f64>,
    pub gap: Option<f64>,
    pub primal_integral: Option<f64>,
}

/// Found count plus shifted geometric means (shift 1) of TTF, gap and PI
/// over the instances where a solution was found.
pub fn aggregate(summaries: &[InstanceSummary]) -> Aggregate {
    let found: Vec<&InstanceSummary> = summaries.iter().filter(|s| s.found).collect();
    let mean = |values: Vec<f64>| shifted_geomean(&values, DEFAULT_SHIFT).ok();
    Aggregate {
        found: found.len(),
        total: summaries.len(),
        ttf: mean(found.iter().filter_map(|s| s.ttf).collect()),
        gap: mean(found.iter().filter_map(|s| s.gap).collect()),
        primal_integral: mean(found.iter().map(|s| s.primal_integral).collect()),
    }
}

/// Text table with the columns Found, TTF, Gap, PI.
pub fn format_table(rows: &[(String, Aggregate)]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    let mut out = format!("{:<16} {:>10} {:>8} {:>8} {:>8}\n", "Category", "Found", "TTF", "Gap", "PI");
    for (label, a) in rows {
        out.push_str(&format!(
            "{:<16} {:>10} {:>8} {:>8} {:>8}\n",
            label,
            format!("{}/{}", a.found, a.total),
            cell(a.ttf),
            cell(a.gap),
            cell(a.primal_integral)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_cases() {
        assert_eq!(primal_gap(0.0, 0.0), 0.0);
        assert_eq!(primal_gap(5.0, -3.0), 1.0);
        assert_eq!(primal_gap(12.0, 10.0), 2.0 / 12.0);
        assert_eq!(primal_gap(0.0, 4.0), 1.0);
        assert_eq!(gap_or_one(None, 4.0), 1.0);
    }

    #[test]
    fn integral_cases() {
        assert_eq!(primal_integral(&IncumbentTrace::new(vec![], 300.0, Some(1.0))), 300.0);
        assert_eq!(primal_integral(&IncumbentTrace::new(vec![], 300.0, None)), 300.0);
        // gap 0.5 from t = 10 to 20
        let t = IncumbentTrace::new(vec![(10.0, 2.0)], 20.0, Some(1.0));
        assert_eq!(primal_integral(&t), 15.0);
        let t = IncumbentTrace::new(vec![(0.0, 1.0)], 20.0, Some(1.0));
        assert_eq!(primal_integral(&t), 0.0);
    }

    #[test]
    fn earlier_improvement_never_hurts() {
        let base = IncumbentTrace::new(vec![(5.0, 8.0), (9.0, 4.0)], 10.0, Some(4.0));
        let added = IncumbentTrace::new(vec![(2.0, 9.0), (5.0, 8.0), (9.0, 4.0)], 10.0, Some(4.0));
        assert!(primal_integral(&added) <= primal_integral(&base));
    }

    #[test]
    fn geomean_cases() {
        assert_eq!(shifted_geomean(&[0.0, 0.0, 0.0], 1.0).unwrap(), 0.0);
        assert!((shifted_geomean(&[1.0, 1.0], 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((shifted_geomean(&[3.0, 8.0], 1.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(shifted_geomean(&[], 1.0).is_err());
        assert!(shifted_geomean(&[-1.0], 1.0).is_err());
    }

    #[test]
    fn table_layout() {
        let rows = vec![
            InstanceSummary {
                name: "a".into(),
                found: true,
                ttf: Some(3.0),
                gap: Some(0.0),
                primal_integral: 8.0,
            },
            InstanceSummary {
                name: "b".into(),
                found: false,
                ttf: None,
                gap: Some(100.0),
                primal_integral: 300.0,
            },
        ];
        let a = aggregate(&rows);
        assert_eq!((a.found, a.total), (1, 2));
        assert_eq!(a.ttf, Some(3.0));
        let table = format_table(&[("All".into(), a)]);
        assert!(table.starts_with("Category"));
        assert!(table.contains("1/2"));
        assert!(table.lines().next().unwrap().contains("Found"));
    }
}
