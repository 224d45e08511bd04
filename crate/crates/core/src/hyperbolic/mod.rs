//! Hyperbolic geometry of H^n in the Poincaré ball, and of H^n x R with the
//! product metric.
//!
//! Points of H^n are coordinate slices `&[f64]` with Euclidean norm below one;
//! the hyperbolic distance from the origin is `2 artanh |x|`. A point of the
//! product space carries an extra height coordinate `t`.

mod geodesic;
mod plane;
mod region;
pub mod vector;

pub use geodesic::{equidistant_offset, translate_along, Geodesic, Translation};
pub(crate) use geodesic::golden_min;
pub use plane::{reflect, HyperplaneKind, Mirror, VerticalHyperplane};
pub use region::{region_membership, Line};

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use vector::{dot, norm, norm2};

/// Tolerance on unit-vector normalization of ideal points.
pub const UNIT_TOL: f64 = 1e-12;

/// Orientation of a half-space or of an offset relative to a normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }
}

/// A point `(x, t)` of H^n x R, `x` in the open unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    x: Vec<f64>,
    t: f64,
}

impl BallPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        if x.len() < 2 {
            return domain(format!("ball dimension must be >= 2, got {}", x.len()));
        }
        check_in_ball(&x)?;
        if !t.is_finite() {
            return domain("height must be finite");
        }
        Ok(BallPoint { x, t })
    }

    /// Constructor for values produced by isometries of already valid points.
    pub(crate) fn from_parts(x: Vec<f64>, t: f64) -> Self {
        debug_assert!(norm2(&x) < 1.0);
        BallPoint { x, t }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Product-metric distance `sqrt(d_H(x, y)^2 + (t - s)^2)`.
    pub fn distance(&self, other: &BallPoint) -> f64 {
        let dh = dist_unchecked(&self.x, &other.x);
        dh.hypot(self.t - other.t)
    }
}

/// A point of the sphere at infinity, optionally at a finite height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint {
    u: Vec<f64>,
    t: Option<f64>,
}

impl IdealPoint {
    /// Validates `|u| = 1` within [`UNIT_TOL`] and renormalizes.
    pub fn new(u: Vec<f64>, t: Option<f64>) -> Result<Self> {
        Self::with_tolerance(u, t, UNIT_TOL)
    }

    pub fn with_tolerance(u: Vec<f64>, t: Option<f64>, tol: f64) -> Result<Self> {
        if u.len() < 2 {
            return domain(format!("ideal point dimension must be >= 2, got {}", u.len()));
        }
        let len = norm(&u);
        if !len.is_finite() || (len - 1.0).abs() > tol {
            return domain(format!("ideal point direction has norm {len}, expected 1"));
        }
        if let Some(h) = t {
            if !h.is_finite() {
                return domain("ideal point height must be finite");
            }
        }
        let u = u.iter().map(|c| c / len).collect();
        Ok(IdealPoint { u, t })
    }

    /// The point `(cos θ, sin θ)` of the circle at infinity of H^2.
    pub fn from_angle(theta: f64, t: Option<f64>) -> Self {
        IdealPoint {
            u: vec![theta.cos(), theta.sin()],
            t,
        }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> Option<f64> {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// Angle between the directions of two ideal points.
    pub fn angle_to(&self, other: &IdealPoint) -> f64 {
        angle_between(&self.u, &other.u)
    }
}

/// Angle between two unit vectors, accurate for nearly parallel inputs.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let d = vector::dist2(a, b).sqrt();
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
    2.0 * d.atan2(s)
}

fn check_in_ball(x: &[f64]) -> Result<()> {
    let r2 = norm2(x);
    if !(r2 < 1.0) {
        return Err(Error::Domain(format!(
            "point with |x| = {} is not inside the open unit ball",
            r2.sqrt()
        )));
    }
    Ok(())
}

/// Hyperbolic distance between two points of the Poincaré ball.
pub fn dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return domain(format!("dimension mismatch {} vs {}", p.len(), q.len()));
    }
    check_in_ball(p)?;
    check_in_ball(q)?;
    Ok(dist_unchecked(p, q))
}

/// `2 asinh(|p - q| / sqrt((1 - |p|^2)(1 - |q|^2)))`, which is the usual
/// arcosh formula rewritten to stay accurate for nearby points.
#[inline]
pub(crate) fn dist_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let d2 = vector::dist2(p, q);
    if d2 == 0.0 {
        return 0.0;
    }
    let denom = (1.0 - norm2(p)) * (1.0 - norm2(q));
    2.0 * (d2 / denom).sqrt().asinh()
}

/// Möbius addition `a ⊕ b`, the isometry of the ball taking 0 to `a`
/// evaluated at `b`.
pub fn mobius_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let ab = dot(a, b);
    let a2 = norm2(a);
    let b2 = norm2(b);
    let ca = 1.0 + 2.0 * ab + b2;
    let cb = 1.0 - a2;
    let den = 1.0 + 2.0 * ab + a2 * b2;
    a.iter()
        .zip(b)
        .map(|(ai, bi)| (ca * ai + cb * bi) / den)
        .collect()
}

/// Point of the ball at hyperbolic distance `r` from the origin in the unit
/// direction `dir`.
pub fn exp_origin(dir: &[f64], r: f64) -> Vec<f64> {
    vector::scaled(dir, (0.5 * r).tanh())
}
