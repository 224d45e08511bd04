use super::vector::{self, norm, normalized};
use super::{dist_unchecked, exp_origin, mobius_add, BallPoint, IdealPoint, Side};
use crate::error::{domain, Result};

/// Minimum angle between the two endpoints of a geodesic.
pub const ENDPOINT_ANGLE_TOL: f64 = 1e-9;
const GOLDEN_TOL: f64 = 1e-12;

/// A complete geodesic of H^n x {0}, oriented from `start` to `end`.
///
/// Internally the geodesic is described by its point `m` closest to the
/// origin and the unit tangent `w` there; the map `x -> m ⊕ x` carries the
/// diameter through 0 in direction `w` onto the geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    start: IdealPoint,
    end: IdealPoint,
    mid: Vec<f64>,
    dir: Vec<f64>,
    normal: Vec<f64>,
}

impl Geodesic {
    pub fn new(start: &IdealPoint, end: &IdealPoint) -> Result<Self> {
        if start.dim() != end.dim() {
            return domain("geodesic endpoints have different dimensions");
        }
        let angle = start.angle_to(end);
        if angle <= ENDPOINT_ANGLE_TOL {
            return domain(format!("geodesic endpoints coincide (angle {angle:e})"));
        }
        let u1 = start.u();
        let u2 = end.u();
        let dir = normalized(&vector::sub(u2, u1)).expect("distinct unit vectors");
        let sum = vector::add(u1, u2);
        let sum_len = norm(&sum);
        let (mid, normal) = if sum_len < super::UNIT_TOL {
            let normal = vector::orthogonal_unit(&dir);
            (vec![0.0; u1.len()], normal)
        } else {
            // Bisector b, circle center b / cos(θ/2), radius tan(θ/2): the
            // closest point to the origin is b (1 - sin(θ/2)) / cos(θ/2).
            let b = vector::scaled(&sum, 1.0 / sum_len);
            let half = 0.5 * angle;
            let k = (1.0 - half.sin()) / half.cos();
            (vector::scaled(&b, k), b)
        };
        Ok(Geodesic {
            start: IdealPoint::new(u1.to_vec(), None)?,
            end: IdealPoint::new(u2.to_vec(), None)?,
            mid,
            dir,
            normal,
        })
    }

    /// The geodesic of H^2 between the boundary angles `theta1` and `theta2`.
    pub fn from_angles(theta1: f64, theta2: f64) -> Result<Self> {
        Geodesic::new(
            &IdealPoint::from_angle(theta1, None),
            &IdealPoint::from_angle(theta2, None),
        )
    }

    pub fn start(&self) -> &IdealPoint {
        &self.start
    }

    pub fn end(&self) -> &IdealPoint {
        &self.end
    }

    pub fn dim(&self) -> usize {
        self.mid.len()
    }

    /// Point of the geodesic closest to the origin; arclength parameter 0.
    pub fn midpoint(&self) -> &[f64] {
        &self.mid
    }

    /// Unit tangent at the midpoint, pointing toward `end`.
    pub fn direction(&self) -> &[f64] {
        &self.dir
    }

    /// Unit normal at the midpoint defining the positive side of the
    /// geodesic. For a geodesic not through the origin it points away from
    /// the origin.
    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn is_diameter(&self) -> bool {
        self.mid.iter().all(|c| *c == 0.0)
    }

    /// Point at signed arclength `s` from the midpoint.
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        mobius_add(&self.mid, &exp_origin(&self.dir, s))
    }

    /// Arclength parameter of the foot point of `x` (golden-section search).
    pub fn foot_parameter(&self, x: &[f64]) -> f64 {
        let reach = 2.0 * dist_unchecked(x, &self.mid) + 1.0;
        golden_min(|s| dist_unchecked(x, &self.point_at(s)), -reach, reach, GOLDEN_TOL).0
    }

    /// Hyperbolic distance from `x` to the geodesic.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        let reach = 2.0 * dist_unchecked(x, &self.mid) + 1.0;
        golden_min(|s| dist_unchecked(x, &self.point_at(s)), -reach, reach, GOLDEN_TOL).1
    }
}

/// Golden-section minimization of a unimodal function; returns (argmin, min).
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// The hyperbolic translation by `s` along a geodesic, applied slice-wise.
#[derive(Debug, Clone)]
pub struct Translation {
    mid: Vec<f64>,
    neg_mid: Vec<f64>,
    step: Vec<f64>,
}

impl Translation {
    pub fn new(g: &Geodesic, s: f64) -> Self {
        Translation {
            mid: g.mid.clone(),
            neg_mid: g.mid.iter().map(|c| -c).collect(),
            step: exp_origin(&g.dir, s),
        }
    }

    /// Applies the translation to a point of H^n.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let local = mobius_add(&self.neg_mid, x);
        let moved = mobius_add(&self.step, &local);
        clamp_into_ball(mobius_add(&self.mid, &moved))
    }

    pub fn apply_point(&self, p: &BallPoint) -> BallPoint {
        BallPoint::from_parts(self.apply(p.x()), p.t())
    }
}

/// Rounding can push images of points extremely close to the sphere onto it.
fn clamp_into_ball(mut x: Vec<f64>) -> Vec<f64> {
    let r = norm(&x);
    if r >= 1.0 {
        let k = (1.0 - f64::EPSILON) / r;
        x.iter_mut().for_each(|c| *c *= k);
    }
    x
}

/// Translates `p` by oriented distance `s` along `g`, keeping its height.
pub fn translate_along(g: &Geodesic, s: f64, p: &BallPoint) -> Result<BallPoint> {
    if p.dim() != g.dim() {
        return domain("point and geodesic have different dimensions");
    }
    if !s.is_finite() {
        return domain("translation distance must be finite");
    }
    Ok(Translation::new(g, s).apply_point(p))
}

/// The point at distance `rho` from `g` on the given side of its normal,
/// whose foot point on `g` sits at arclength `u` from the midpoint.
pub fn equidistant_offset(g: &Geodesic, rho: f64, side: Side, u: f64) -> Result<Vec<f64>> {
    if !(rho > 0.0) || !rho.is_finite() {
        return domain(format!("offset distance must be positive, got {rho}"));
    }
    let base = exp_origin(&g.normal, side.sign() * rho);
    let along = mobius_add(&exp_origin(&g.dir, u), &base);
    Ok(clamp_into_ball(mobius_add(&g.mid, &along)))
}

/// Coordinates of `x` in the standard frame of `g`: the component along the
/// tangent, and the signed distance to the hyperplane containing `g` with
/// normal `g.normal()` (the distance to `g` itself when n = 2).
#[cfg(test)]
fn frame_coordinates(g: &Geodesic, x: &[f64]) -> (f64, f64) {
    let neg_mid: Vec<f64> = g.mid.iter().map(|c| -c).collect();
    let local = mobius_add(&neg_mid, x);
    let along = vector::dot(&local, &g.dir);
    let across = vector::dot(&local, &g.normal);
    let r2 = super::vector::norm2(&local);
    (along, (2.0 * across / (1.0 - r2)).asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::dist;
    use proptest::prelude::*;

    fn diameter_e1() -> Geodesic {
        Geodesic::new(
            &IdealPoint::new(vec![-1.0, 0.0], None).unwrap(),
            &IdealPoint::new(vec![1.0, 0.0], None).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_coincident_endpoints() {
        assert!(Geodesic::from_angles(0.3, 0.3).is_err());
    }

    #[test]
    fn translation_of_origin_along_diameter() {
        let g = diameter_e1();
        let p = BallPoint::new(vec![0.0, 0.0], 0.7).unwrap();
        let q = translate_along(&g, 1.3, &p).unwrap();
        assert!((q.x()[0] - (0.65f64).tanh()).abs() < 1e-15);
        assert!(q.x()[1].abs() < 1e-15);
        assert_eq!(q.t(), 0.7);
        assert_eq!(translate_along(&g, 0.0, &p).unwrap(), p);
    }

    #[test]
    fn midpoint_lies_on_circle_orthogonal_to_boundary() {
        let g = Geodesic::from_angles(0.2, 1.9).unwrap();
        // Points of the geodesic lie on |x - c| = r with |c|^2 = r^2 + 1.
        let b = g.normal().to_vec();
        let half = 0.5 * (1.9f64 - 0.2);
        let c = vector::scaled(&b, 1.0 / half.cos());
        let r = half.tan();
        for s in [-3.0, -0.5, 0.0, 0.4, 2.5] {
            let p = g.point_at(s);
            assert!((vector::dist2(&p, &c).sqrt() - r).abs() < 1e-12);
            assert!((dist(&p, g.midpoint()).unwrap() - f64::abs(s)).abs() < 1e-10);
        }
    }

    #[test]
    fn equidistant_at_zero_on_perpendicular_diameter() {
        let g = diameter_e1();
        let rho = 0.8;
        let p = equidistant_offset(&g, rho, Side::Positive, 0.0).unwrap();
        assert!(p[0].abs() < 1e-15);
        // Oracle: bisection for the point y e2 with dist(0, y e2) = rho.
        let (mut lo, mut hi) = (0.0, 1.0 - 1e-15);
        for _ in 0..200 {
            let y = 0.5 * (lo + hi);
            if dist(&[0.0, 0.0], &[0.0, y]).unwrap() < rho {
                lo = y;
            } else {
                hi = y;
            }
        }
        assert!((p[1] - 0.5 * (lo + hi)).abs() < 1e-12);
    }

    #[test]
    fn equidistant_rejects_nonpositive_distance() {
        let g = diameter_e1();
        assert!(equidistant_offset(&g, 0.0, Side::Positive, 0.0).is_err());
        assert!(equidistant_offset(&g, -1.0, Side::Negative, 0.0).is_err());
    }

    #[test]
    fn equidistant_at_arcosh_two() {
        let g = Geodesic::from_angles(-0.4, 2.0).unwrap();
        let rho = 2f64.acosh();
        for u in [-1.5, 0.0, 0.7] {
            let p = equidistant_offset(&g, rho, Side::Negative, u).unwrap();
            assert!((g.distance_to(&p) - rho).abs() < 1e-10);
        }
    }

    #[test]
    fn distance_to_diameter_closed_form() {
        // sinh d = 2 |x_perp| / (1 - |x|^2) for the e1 diameter.
        let g = diameter_e1();
        let x = [0.3, -0.45];
        let closed = (2.0f64 * 0.45 / (1.0 - 0.09 - 0.2025)).asinh();
        assert!((g.distance_to(&x) - closed).abs() < 1e-12);
    }

    fn angle() -> impl Strategy<Value = f64> {
        0.0f64..std::f64::consts::TAU
    }

    fn disk_point() -> impl Strategy<Value = Vec<f64>> {
        (0.0f64..0.95, angle()).prop_map(|(r, a)| vec![r * a.cos(), r * a.sin()])
    }

    proptest! {
        #[test]
        fn translation_is_isometry_with_group_law(
            a1 in angle(), a2 in angle(), s1 in -3.0f64..3.0, s2 in -3.0f64..3.0,
            p in disk_point(), q in disk_point()
        ) {
            prop_assume!((a1 - a2).abs() > 0.05 && (a1 - a2).abs() < std::f64::consts::TAU - 0.05);
            let g = Geodesic::from_angles(a1, a2).unwrap();
            let t1 = Translation::new(&g, s1);
            let d0 = dist(&p, &q).unwrap();
            let d1 = dist(&t1.apply(&p), &t1.apply(&q)).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-10 * (1.0 + d0));
            let composed = t1.apply(&Translation::new(&g, s2).apply(&p));
            let direct = Translation::new(&g, s1 + s2).apply(&p);
            prop_assert!(dist(&composed, &direct).unwrap() < 1e-10);
            // Points of g move by exactly |s| along g.
            let on = g.point_at(s2);
            prop_assert!((dist(&t1.apply(&on), &on).unwrap() - s1.abs()).abs() < 1e-9);
        }

        #[test]
        fn equidistant_reproduces_distance(
            a1 in angle(), a2 in angle(), rho in 0.05f64..3.0, u in -2.0f64..2.0, pos in any::<bool>()
        ) {
            prop_assume!((a1 - a2).abs() > 0.05 && (a1 - a2).abs() < std::f64::consts::TAU - 0.05);
            let g = Geodesic::from_angles(a1, a2).unwrap();
            let side = if pos { Side::Positive } else { Side::Negative };
            let p = equidistant_offset(&g, rho, side, u).unwrap();
            prop_assert!((g.distance_to(&p) - rho).abs() < 1e-10);
            let (along, offset) = frame_coordinates(&g, &p);
            prop_assert!((offset - side.sign() * rho).abs() < 1e-9);
            prop_assert!(along.is_finite());
        }
    }
}
