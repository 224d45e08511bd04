//! Curves in the asymptotic boundary of H^n x R.

use crate::error::{domain, Result};
use crate::hyperbolic::{angle_between, IdealPoint};
use serde::{Deserialize, Serialize};

/// Ordered samples of a curve in the boundary at infinity, every vertex
/// carrying a finite height. `boundary[i]` marks vertices on the curve's
/// own boundary (used for curves with boundary).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCurve {
    vertices: Vec<IdealPoint>,
    boundary: Vec<bool>,
    closed: bool,
}

/// Directions closer than this are treated as one vertex.
pub const DISTINCT_TOL: f64 = 1e-12;

impl AsymptoticCurve {
    pub fn new(vertices: Vec<IdealPoint>, closed: bool) -> Result<Self> {
        let flags = vec![false; vertices.len()];
        Self::with_boundary(vertices, flags, closed)
    }

    pub fn with_boundary(vertices: Vec<IdealPoint>, boundary: Vec<bool>, closed: bool) -> Result<Self> {
        if vertices.is_empty() {
            return domain("asymptotic curve has no vertices");
        }
        if boundary.len() != vertices.len() {
            return domain(format!(
                "{} boundary flags for {} vertices",
                boundary.len(),
                vertices.len()
            ));
        }
        let n = vertices[0].dim();
        for (i, v) in vertices.iter().enumerate() {
            if v.dim() != n {
                return domain(format!("vertex {i} has dimension {} instead of {n}", v.dim()));
            }
            match v.t() {
                Some(t) if t.is_finite() => {}
                _ => return domain(format!("vertex {i} has no finite height")),
            }
        }
        let count = vertices.len();
        let pairs = if closed && count > 1 { count } else { count - 1 };
        for i in 0..pairs {
            let (p, q) = (&vertices[i], &vertices[(i + 1) % count]);
            if angle_between(p.u(), q.u()) <= DISTINCT_TOL && p.t() == q.t() {
                return domain(format!("consecutive vertices {i} and {} coincide", (i + 1) % count));
            }
        }
        Ok(AsymptoticCurve {
            vertices,
            boundary,
            closed,
        })
    }

    pub fn vertices(&self) -> &[IdealPoint] {
        &self.vertices
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.vertices.iter().map(|v| v.t().expect("validated height"))
    }

    /// `(min, max)` of the heights.
    pub fn height_range(&self) -> (f64, f64) {
        self.heights()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
    }
}
