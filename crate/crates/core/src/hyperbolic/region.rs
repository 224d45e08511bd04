use super::{angle_between, BallPoint, IdealPoint, VerticalHyperplane};
use crate::error::{domain, Error, Result};

const SIDE_TOL: f64 = 1e-12;

/// A vertical line `{p} x R` of the asymptotic boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    base: IdealPoint,
}

impl Line {
    pub fn new(base: IdealPoint) -> Self {
        Line {
            base: IdealPoint::new(base.u().to_vec(), None).expect("already a unit vector"),
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        Line {
            base: IdealPoint::from_angle(theta, None),
        }
    }

    pub fn base(&self) -> &IdealPoint {
        &self.base
    }
}

/// The half-space planes bounding the region spanned by a cycle of lines,
/// each oriented so that every line lies in the closure of its positive side.
pub fn bounding_planes(lines: &[Line]) -> Result<Vec<VerticalHyperplane>> {
    let k = lines.len();
    if k < 3 {
        return domain(format!("need at least 3 lines, got {k}"));
    }
    if lines.iter().any(|l| l.base.dim() != 2) {
        return Err(Error::UnsupportedDimension(lines[0].base.dim()));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if angle_between(lines[i].base.u(), lines[j].base.u()) <= super::geodesic::ENDPOINT_ANGLE_TOL {
                return domain(format!("lines {i} and {j} have the same base point"));
            }
        }
    }
    let mut planes = Vec::with_capacity(k);
    for i in 0..k {
        let next = (i + 1) % k;
        let plane = VerticalHyperplane::through_ideal_points(&lines[i].base, &lines[next].base)?;
        let (mut pos, mut neg) = (0usize, 0usize);
        for (j, line) in lines.iter().enumerate() {
            if j == i || j == next {
                continue;
            }
            let v = plane.side_value(line.base.u());
            if v > SIDE_TOL {
                pos += 1;
            } else if v < -SIDE_TOL {
                neg += 1;
            }
        }
        let plane = match (pos, neg) {
            (0, 0) => {
                return Err(Error::DegenerateConfiguration(format!(
                    "all lines lie on the plane through lines {i} and {next}"
                )))
            }
            (_, 0) => plane,
            (0, _) => plane.with_side(plane.side().flipped()),
            _ => {
                return Err(Error::DegenerateConfiguration(format!(
                    "lines lie on both sides of the plane through lines {i} and {next}; \
                     base points are not in cyclic convex order"
                )))
            }
        };
        planes.push(plane);
    }
    Ok(planes)
}

/// Whether `p` lies in the closed region cut out by the vertical planes
/// through consecutive lines (the last line pairs with the first).
pub fn region_membership(p: &BallPoint, lines: &[Line]) -> Result<bool> {
    let planes = bounding_planes(lines)?;
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    Ok(planes.iter().all(|h| h.signed_distance(p.x()) >= -SIDE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_3, TAU};

    fn tri() -> Vec<Line> {
        (0..3).map(|i| Line::from_angle(i as f64 * 2.0 * FRAC_PI_3)).collect()
    }

    #[test]
    fn origin_inside_equilateral() {
        let p = BallPoint::new(vec![0.0, 0.0], 3.0).unwrap();
        assert!(region_membership(&p, &tri()).unwrap());
    }

    #[test]
    fn far_point_opposite_all_lines_is_outside() {
        // Direction pi/3 is opposite the base point at 4pi/3 and lies between
        // the first two base points but beyond their plane.
        let r = 1.0 - 1e-6;
        let p = BallPoint::new(vec![r * FRAC_PI_3.cos(), r * FRAC_PI_3.sin()], 0.0).unwrap();
        assert!(!region_membership(&p, &tri()).unwrap());
    }

    #[test]
    fn boundary_point_is_member() {
        let lines = tri();
        let g = crate::hyperbolic::Geodesic::new(lines[0].base(), lines[1].base()).unwrap();
        let p = BallPoint::new(g.point_at(0.4), 0.0).unwrap();
        assert!(region_membership(&p, &lines).unwrap());
    }

    #[test]
    fn error_paths() {
        let p = BallPoint::new(vec![0.0, 0.0], 0.0).unwrap();
        let two: Vec<Line> = (0..2).map(|i| Line::from_angle(i as f64)).collect();
        assert!(matches!(region_membership(&p, &two), Err(Error::Domain(_))));
        let repeated = vec![Line::from_angle(0.0), Line::from_angle(1.0), Line::from_angle(0.0)];
        assert!(matches!(region_membership(&p, &repeated), Err(Error::Domain(_))));
        let crossed = vec![
            Line::from_angle(0.0),
            Line::from_angle(2.0),
            Line::from_angle(1.0),
            Line::from_angle(4.0),
        ];
        assert!(matches!(
            region_membership(&p, &crossed),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    /// Oracle: the Klein model turns the planes into chords, so membership is
    /// a convex-polygon test on the Klein image of `p`.
    fn klein_polygon_contains(x: &[f64], angles: &[f64]) -> bool {
        let s = 1.0 + x[0] * x[0] + x[1] * x[1];
        let k = [2.0 * x[0] / s, 2.0 * x[1] / s];
        let n = angles.len();
        (0..n).all(|i| {
            let (a, b) = (angles[i], angles[(i + 1) % n]);
            let (ax, ay) = (a.cos(), a.sin());
            let (bx, by) = (b.cos(), b.sin());
            let cross = (bx - ax) * (k[1] - ay) - (by - ay) * (k[0] - ax);
            cross >= -1e-12
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn agrees_with_klein_oracle(
            mut angles in prop::collection::vec(0.0f64..TAU, 3..7),
            r in 0.0f64..0.999, phi in 0.0f64..TAU,
        ) {
            angles.sort_by(f64::total_cmp);
            let gaps_ok = (0..angles.len()).all(|i| {
                let next = if i + 1 == angles.len() { angles[0] + TAU } else { angles[i + 1] };
                next - angles[i] > 1e-3
            });
            prop_assume!(gaps_ok);
            let lines: Vec<Line> = angles.iter().map(|&a| Line::from_angle(a)).collect();
            let x = vec![r * phi.cos(), r * phi.sin()];
            let p = BallPoint::new(x.clone(), 0.0).unwrap();
            match region_membership(&p, &lines) {
                Ok(inside) => {
                    // Skip points within rounding distance of a bounding plane.
                    let planes = bounding_planes(&lines).unwrap();
                    let margin = planes.iter().map(|h| h.signed_distance(&x).abs()).fold(f64::INFINITY, f64::min);
                    prop_assume!(margin > 1e-9);
                    prop_assert_eq!(inside, klein_polygon_contains(&x, &angles));
                }
                // Counter-clockwise sorted angles with a half-circle gap are
                // still convex; only collinear-with-boundary setups can fail.
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
