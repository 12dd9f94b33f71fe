//! Small dense vector helpers shared by the solver modules.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

/// Resolution of [`point_key`]: points closer than this per coordinate hash
/// to the same key.
pub const POINT_KEY_RESOLUTION: f64 = 1e-9;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sum accumulated with error-free transformations (TwoSum, and FMA-based
/// TwoProduct for products), as accurate as summing in twice the working
/// precision. Line searches compare objective values whose difference is
/// far below the rounding error of a plain sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let s = self.sum + v;
        let b = s - self.sum;
        self.err += (self.sum - (s - b)) + (v - b);
        self.sum = s;
    }

    /// Adds `a * b`.
    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.err += a.mul_add(b, -p);
        self.add(p);
    }

    /// Adds `a * b * c`.
    #[inline]
    pub fn add_triple(&mut self, a: f64, b: f64, c: f64) {
        let ab = a * b;
        self.err += a.mul_add(b, -ab) * c;
        self.add_product(ab, c);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Hash key of a point rounded to [`POINT_KEY_RESOLUTION`].
pub fn point_key(x: &[f64]) -> Vec<i64> {
    x.iter()
        .map(|v| (v / POINT_KEY_RESOLUTION).round() as i64)
        .collect()
}

/// Cooperative cancellation: a wall-clock deadline plus a shared stop flag.
#[derive(Debug, Clone, Default)]
pub struct StopSignal {
    pub deadline: Option<Instant>,
    pub flag: Option<Arc<AtomicBool>>,
}

impl StopSignal {
    pub fn none() -> Self {
        StopSignal::default()
    }

    pub fn with_deadline(deadline: Instant) -> Self {
        StopSignal {
            deadline: Some(deadline),
            flag: None,
        }
    }

    /// The earlier of the two deadlines, sharing the flag.
    pub fn tightened(&self, deadline: Option<Instant>) -> Self {
        let deadline = match (self.deadline, deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        StopSignal {
            deadline,
            flag: self.flag.clone(),
        }
    }

    pub fn should_stop(&self) -> bool {
        if let Some(flag) = &self.flag {
            if flag.load(Ordering::Relaxed) {
                return true;
            }
        }
        match self.deadline {
            Some(d) => Instant::now() >= d,
            None => false,
        }
    }
}
