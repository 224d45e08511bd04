use super::vector::{self, dot, norm, norm2};
use super::{BallPoint, Geodesic, IdealPoint, Side, UNIT_TOL};
use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// Representation of a totally geodesic hyperplane of the Poincaré ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HyperplaneKind {
    /// `{x : x . normal = 0}`, a hyperplane through the origin.
    Diameter { normal: Vec<f64> },
    /// The part of the sphere `|x - center| = radius` inside the ball, with
    /// `|center|^2 = radius^2 + 1`.
    Sphere { center: Vec<f64>, radius: f64 },
}

/// A vertical hyperplane `π x R` together with a chosen positive side.
///
/// The raw side function is `x . normal` for diameters and
/// `|x - center|^2 - radius^2` for spheres (positive on the side of the
/// origin); `side` flips it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticalHyperplane {
    kind: HyperplaneKind,
    side: Side,
}

impl VerticalHyperplane {
    pub fn diameter(normal: Vec<f64>, side: Side) -> Result<Self> {
        if normal.len() < 2 {
            return domain("hyperplane normal must have dimension >= 2");
        }
        let unit = vector::normalized(&normal)
            .ok_or_else(|| crate::Error::Domain("hyperplane normal is zero".into()))?;
        Ok(VerticalHyperplane {
            kind: HyperplaneKind::Diameter { normal: unit },
            side,
        })
    }

    /// Sphere-type hyperplane; the sphere must be orthogonal to the boundary.
    pub fn sphere(center: Vec<f64>, radius: f64, side: Side) -> Result<Self> {
        if center.len() < 2 {
            return domain("hyperplane center must have dimension >= 2");
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("degenerate mirror: radius {radius} must be positive"));
        }
        let c2 = norm2(&center);
        let excess = c2 - radius * radius - 1.0;
        if excess.abs() > UNIT_TOL * c2.max(1.0) {
            return domain(format!(
                "sphere is not orthogonal to the boundary: |c|^2 - r^2 - 1 = {excess:e}"
            ));
        }
        Ok(VerticalHyperplane {
            kind: HyperplaneKind::Sphere { center, radius },
            side,
        })
    }

    /// The hyperplane containing `g` whose positive side is `g.normal()`'s.
    pub fn containing_geodesic(g: &Geodesic) -> Self {
        let u1 = g.start().u();
        let u2 = g.end().u();
        let sum = vector::add(u1, u2);
        let sum2 = norm2(&sum);
        if sum2.sqrt() < UNIT_TOL {
            VerticalHyperplane {
                kind: HyperplaneKind::Diameter {
                    normal: g.normal().to_vec(),
                },
                side: Side::Positive,
            }
        } else {
            let center = vector::scaled(&sum, 2.0 / sum2);
            let radius = vector::dist2(u1, u2).sqrt() / sum2.sqrt();
            // The normal points into the sphere, where the raw function is negative.
            VerticalHyperplane {
                kind: HyperplaneKind::Sphere { center, radius },
                side: Side::Negative,
            }
        }
    }

    /// The vertical plane of H^2 x R whose boundary contains the lines over
    /// `p` and `q`.
    pub fn through_ideal_points(p: &IdealPoint, q: &IdealPoint) -> Result<Self> {
        Ok(Self::containing_geodesic(&Geodesic::new(p, q)?))
    }

    /// The hyperplane orthogonal to `g` through its midpoint.
    pub fn perpendicular_bisector(g: &Geodesic) -> Self {
        // x -> m ⊕ x fixes the diameter through m, and m is orthogonal to the
        // tangent, so the image of {y . w = 0} is {x . w = 0}.
        VerticalHyperplane {
            kind: HyperplaneKind::Diameter {
                normal: g.direction().to_vec(),
            },
            side: Side::Positive,
        }
    }

    pub fn kind(&self) -> &HyperplaneKind {
        &self.kind
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn with_side(&self, side: Side) -> Self {
        VerticalHyperplane {
            kind: self.kind.clone(),
            side,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            HyperplaneKind::Diameter { normal } => normal.len(),
            HyperplaneKind::Sphere { center, .. } => center.len(),
        }
    }

    /// Oriented raw side function at a point of the closed ball. Only its sign
    /// is meaningful on the boundary sphere.
    pub fn side_value(&self, x: &[f64]) -> f64 {
        let raw = match &self.kind {
            HyperplaneKind::Diameter { normal } => dot(x, normal),
            HyperplaneKind::Sphere { center, radius } => vector::dist2(x, center) - radius * radius,
        };
        self.side.sign() * raw
    }

    /// Signed hyperbolic distance from `x` to the hyperplane, positive on the
    /// chosen side.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        let w = 1.0 - norm2(x);
        let arg = match &self.kind {
            HyperplaneKind::Diameter { normal } => 2.0 * dot(x, normal) / w,
            HyperplaneKind::Sphere { center, radius } => {
                (vector::dist2(x, center) - radius * radius) / (radius * w)
            }
        };
        self.side.sign() * arg.asinh()
    }

    /// Hyperbolic reflection of a point of H^n in the hyperplane.
    pub fn reflect_x(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            HyperplaneKind::Diameter { normal } => {
                let c = 2.0 * dot(x, normal);
                x.iter().zip(normal).map(|(xi, ni)| xi - c * ni).collect()
            }
            HyperplaneKind::Sphere { center, radius } => {
                let rel = vector::sub(x, center);
                let k = radius * radius / norm2(&rel);
                let mut y: Vec<f64> = center.iter().zip(&rel).map(|(c, r)| c + k * r).collect();
                let len = norm(&y);
                if len >= 1.0 {
                    y.iter_mut().for_each(|c| *c *= (1.0 - f64::EPSILON) / len);
                }
                y
            }
        }
    }
}

/// A mirror for reflections of H^n x R.
#[derive(Debug, Clone, PartialEq)]
pub enum Mirror {
    Plane(VerticalHyperplane),
    /// The slice `H^n x {s}`.
    Slice(f64),
}

impl Mirror {
    pub(crate) fn reflect_unchecked(&self, p: &BallPoint) -> BallPoint {
        match self {
            Mirror::Plane(h) => BallPoint::from_parts(h.reflect_x(p.x()), p.t()),
            Mirror::Slice(s) => BallPoint::from_parts(p.x().to_vec(), 2.0 * s - p.t()),
        }
    }
}

/// Reflects `p` through the mirror.
pub fn reflect(p: &BallPoint, mirror: &Mirror) -> Result<BallPoint> {
    match mirror {
        Mirror::Plane(h) if h.dim() != p.dim() => {
            domain("mirror and point have different dimensions")
        }
        Mirror::Slice(s) if !s.is_finite() => domain("slice height must be finite"),
        _ => Ok(mirror.reflect_unchecked(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::dist;
    use proptest::prelude::*;

    #[test]
    fn reflect_examples() {
        let p = BallPoint::new(vec![0.3, 0.0, 0.0], 0.4).unwrap();
        let slice = reflect(&p, &Mirror::Slice(0.0)).unwrap();
        assert_eq!(slice.x(), p.x());
        assert_eq!(slice.t(), -0.4);
        let e1 = VerticalHyperplane::diameter(vec![1.0, 0.0, 0.0], Side::Positive).unwrap();
        let q = reflect(&p, &Mirror::Plane(e1.clone())).unwrap();
        assert_eq!(q.x(), &[-0.3, 0.0, 0.0]);
        assert_eq!(q.t(), 0.4);
        let on = BallPoint::new(vec![0.0, 0.2, -0.1], 1.0).unwrap();
        assert_eq!(reflect(&on, &Mirror::Plane(e1)).unwrap(), on);
    }

    #[test]
    fn degenerate_sphere_rejected() {
        assert!(VerticalHyperplane::sphere(vec![1.0, 0.0], 0.0, Side::Positive).is_err());
        assert!(VerticalHyperplane::sphere(vec![2.0, 0.0], 1.0, Side::Positive).is_err());
        assert!(VerticalHyperplane::sphere(vec![2.0, 0.0], 3f64.sqrt(), Side::Positive).is_ok());
    }

    #[test]
    fn sphere_points_fixed_by_reflection() {
        let g = Geodesic::from_angles(0.1, 1.4).unwrap();
        let h = VerticalHyperplane::containing_geodesic(&g);
        for s in [-2.0, 0.0, 1.1] {
            let p = g.point_at(s);
            let q = h.reflect_x(&p);
            assert!(vector::dist2(&p, &q).sqrt() < 1e-12);
            assert!(h.signed_distance(&p).abs() < 1e-12);
        }
        // The normal side is positive.
        let off = crate::hyperbolic::equidistant_offset(&g, 0.5, Side::Positive, 0.3).unwrap();
        assert!((h.signed_distance(&off) - 0.5).abs() < 1e-10);
    }

    fn plane() -> impl Strategy<Value = VerticalHyperplane> {
        (0.0f64..std::f64::consts::TAU, 0.05f64..3.1, any::<bool>()).prop_map(|(a, w, diam)| {
            if diam {
                VerticalHyperplane::diameter(vec![a.cos(), a.sin()], Side::Positive).unwrap()
            } else {
                VerticalHyperplane::containing_geodesic(&Geodesic::from_angles(a, a + w).unwrap())
            }
        })
    }

    fn disk_point() -> impl Strategy<Value = Vec<f64>> {
        (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| vec![r * a.cos(), r * a.sin()])
    }

    proptest! {
        #[test]
        fn reflection_is_involutive_isometry(h in plane(), p in disk_point(), q in disk_point()) {
            let rp = h.reflect_x(&p);
            let back = h.reflect_x(&rp);
            prop_assert!(vector::dist2(&back, &p).sqrt() < 1e-12 / (1.0 - vector::norm2(&p)));
            let d0 = dist(&p, &q).unwrap();
            let d1 = dist(&rp, &h.reflect_x(&q)).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-10 * (1.0 + d0));
        }

        #[test]
        fn signed_distance_is_half_reflection_gap(h in plane(), p in disk_point()) {
            let sd = h.signed_distance(&p);
            let gap = dist(&p, &h.reflect_x(&p)).unwrap();
            prop_assert!((2.0 * sd.abs() - gap).abs() < 1e-9 * (1.0 + gap));
            prop_assert!((h.signed_distance(&h.reflect_x(&p)) + sd).abs() < 1e-9 * (1.0 + gap));
        }
    }
}
