use std::collections::HashSet;

use super::{Region, ROW_TOL};
use crate::util::{dot, point_key};

/// Deduplicated store of vertices returned by the oracle, used for
/// lazification and as the pool of dropped active-set vertices.
#[derive(Debug, Clone, Default)]
pub struct VertexCache {
    vertices: Vec<Vec<f64>>,
    keys: HashSet<Vec<i64>>,
}

impl VertexCache {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Inserts `v` if it lies in `region` (rows within `1e-7`, integrality)
    /// and is not already present. Returns whether it was added.
    pub fn insert(&mut self, v: &[f64], region: &Region) -> bool {
        if !region.contains(v, ROW_TOL) || !region.is_integral(v) {
            return false;
        }
        if self.keys.insert(point_key(v)) {
            self.vertices.push(v.to_vec());
            true
        } else {
            false
        }
    }

    /// Most recently added vertex inside `region` with
    /// `<gradient, x - v> >= phi / 2`.
    pub fn lazy_lookup(&self, gradient: &[f64], x: &[f64], phi: f64, region: &Region) -> Option<&[f64]> {
        let gx = dot(gradient, x);
        let threshold = phi / 2.0;
        self.vertices
            .iter()
            .rev()
            .find(|v| gx - dot(gradient, v) >= threshold && region.contains(v, ROW_TOL))
            .map(|v| v.as_slice())
    }
}
