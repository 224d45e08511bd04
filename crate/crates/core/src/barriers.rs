//! Numerical maximum-principle experiments on meshes: first contact under
//! translation along a geodesic, half-space clearance and reflection
//! symmetry residuals.
//!
//! Everything here works at mesh resolution (vertex-to-triangle distances).
//! It illustrates the geometry of the barrier arguments; it proves nothing
//! about the continuous hypersurfaces.

use crate::error::{domain, Result};
use crate::hyperbolic::vector::{self, orthogonal_unit};
use crate::hyperbolic::{exp_origin, mobius_add, BallPoint, Geodesic, Mirror, Side, Translation, VerticalHyperplane};
use crate::mesh::{mesh_distance, vertex_hausdorff, Mesh};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_CONTACT_TOL: f64 = 1e-6;
/// Bisection refines a contact to `step * REFINE_FACTOR`.
pub const REFINE_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStatus {
    /// The distance dropped to `contact_tol`.
    Contact,
    /// No contact, and the distance was not decreasing at the end of the
    /// range.
    Disjoint,
    /// No contact, but the distance was still decreasing at the end of the
    /// range.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub contact: Option<f64>,
    /// Distance at the refined contact parameter.
    pub contact_distance: Option<f64>,
    pub clearance_profile: Vec<(f64, f64)>,
    pub status: SweepStatus,
}

/// Sample parameters `lo, lo + step, ...` up to and including `hi`.
pub fn sweep_samples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize;
    let mut s: Vec<f64> = (0..=count).map(|k| lo + k as f64 * step).collect();
    if hi - s[count] > 1e-9 * step {
        s.push(hi);
    }
    s
}

/// Translates `moving` along `g` over `s_range` and reports the first
/// parameter at which it comes within `contact_tol` of `fixed`.
pub fn sweep_contact(
    moving: &Mesh,
    fixed: &Mesh,
    g: &Geodesic,
    s_range: (f64, f64),
    step: f64,
    contact_tol: f64,
) -> Result<SweepResult> {
    let dist = |s: f64| mesh_distance(&moving.translated(&Translation::new(g, s)), fixed);
    sweep_with(moving, fixed, g, s_range, step, contact_tol, dist)
}

/// Sweep driver with a caller-supplied distance `D(s)`; shared with
/// brute-force reference implementations.
pub fn sweep_with(
    moving: &Mesh,
    fixed: &Mesh,
    g: &Geodesic,
    (lo, hi): (f64, f64),
    step: f64,
    contact_tol: f64,
    dist: impl Fn(f64) -> f64 + Sync,
) -> Result<SweepResult> {
    if moving.is_empty() || fixed.is_empty() {
        return domain("sweep needs two non-empty meshes");
    }
    if moving.dim() != fixed.dim() || moving.dim() != Some(g.dim()) {
        return domain("meshes and geodesic must share the dimension");
    }
    if !(step > 0.0) || !step.is_finite() {
        return domain(format!("step must be positive, got {step}"));
    }
    if !(contact_tol > 0.0) {
        return domain(format!("contact tolerance must be positive, got {contact_tol}"));
    }
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("invalid range [{lo}, {hi}]"));
    }
    let samples = sweep_samples(lo, hi, step);
    let profile: Vec<(f64, f64)> = samples.par_iter().map(|&s| (s, dist(s))).collect();
    let first = profile.iter().position(|&(_, d)| d <= contact_tol);
    if let Some(k) = first {
        let (s_star, d_star) = if k == 0 {
            profile[0]
        } else {
            let (mut a, mut b) = (profile[k - 1].0, profile[k].0);
            let mut db = profile[k].1;
            while b - a > step * REFINE_FACTOR {
                let m = 0.5 * (a + b);
                let dm = dist(m);
                if dm <= contact_tol {
                    b = m;
                    db = dm;
                } else {
                    a = m;
                }
            }
            (b, db)
        };
        return Ok(SweepResult {
            contact: Some(s_star),
            contact_distance: Some(d_star),
            clearance_profile: profile,
            status: SweepStatus::Contact,
        });
    }
    let len = profile.len();
    let decreasing_at_end = len >= 2 && profile[len - 1].1 < profile[len - 2].1;
    Ok(SweepResult {
        contact: None,
        contact_distance: None,
        clearance_profile: profile,
        status: if decreasing_at_end {
            SweepStatus::Exhausted
        } else {
            SweepStatus::Disjoint
        },
    })
}

/// Minimum over vertices of the signed distance to `p`, positive on `side`
/// (which replaces the plane's own orientation), with the index of a
/// minimizing vertex.
pub fn halfspace_clearance(m: &Mesh, p: &VerticalHyperplane, side: Side) -> Result<(f64, usize)> {
    if m.is_empty() {
        return domain("clearance of an empty mesh");
    }
    if m.dim() != Some(p.dim()) {
        return domain("mesh and hyperplane dimensions differ");
    }
    let oriented = p.with_side(side);
    let (d, i) = m
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (oriented.signed_distance(v.x()), i))
        .fold((f64::INFINITY, 0), |best, cur| if cur.0 < best.0 { cur } else { best });
    Ok((d, i))
}

/// Two-sided vertex-to-triangle Hausdorff distance between `m` and its
/// mirror image.
pub fn reflect_residual(m: &Mesh, mirror: &Mirror) -> Result<f64> {
    if let Mirror::Plane(h) = mirror {
        if m.dim().is_some_and(|n| n != h.dim()) {
            return domain("mesh and mirror dimensions differ");
        }
    }
    if let Mirror::Slice(s) = mirror {
        if !s.is_finite() {
            return domain("slice height must be finite");
        }
    }
    Ok(vertex_hausdorff(m, &m.reflected(mirror)))
}

/// Triangulated geodesic sphere of radius `r` in H^n x R centered at
/// `(g(s_center), t_center)`, with its two poles on `g`. `res` meridians and
/// `res / 2` latitude bands; the sphere lies in the 3-space spanned by the
/// tangent of `g`, one normal direction and the height axis.
pub fn geodesic_sphere_mesh(g: &Geodesic, s_center: f64, t_center: f64, r: f64, res: usize) -> Result<Mesh> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("sphere radius must be positive, got {r}"));
    }
    if res < 4 {
        return domain(format!("sphere resolution must be >= 4, got {res}"));
    }
    let c = g.point_at(s_center);
    let neg_c: Vec<f64> = c.iter().map(|v| -v).collect();
    // Tangent of g at c, pulled back to the origin.
    let ahead = mobius_add(&neg_c, &g.point_at(s_center + 1.0));
    let e = vector::normalized(&ahead).ok_or_else(|| crate::Error::Numerical("degenerate tangent".into()))?;
    let e_perp = orthogonal_unit(&e);
    let lat = (res / 2).max(2);
    let point = |phi: f64, th: f64| -> Result<BallPoint> {
        let along = phi.cos();
        let side = phi.sin() * th.cos();
        let up = phi.sin() * th.sin();
        let dir: Vec<f64> = e.iter().zip(&e_perp).map(|(a, b)| along * a + side * b).collect();
        let len = vector::norm(&dir);
        let y = if len > 0.0 {
            exp_origin(&vector::scaled(&dir, 1.0 / len), r * len)
        } else {
            vec![0.0; e.len()]
        };
        BallPoint::new(mobius_add(&c, &y), t_center + r * up)
    };
    let mut vertices = vec![point(0.0, 0.0)?];
    for k in 1..lat {
        let phi = std::f64::consts::PI * k as f64 / lat as f64;
        for j in 0..res {
            vertices.push(point(phi, 2.0 * std::f64::consts::PI * j as f64 / res as f64)?);
        }
    }
    let south = vertices.len();
    vertices.push(point(std::f64::consts::PI, 0.0)?);
    let ring = |k: usize, j: usize| 1 + (k - 1) * res + (j % res);
    let mut faces = Vec::new();
    for j in 0..res {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
        faces.push([south, ring(lat - 1, j + 1), ring(lat - 1, j)]);
    }
    for k in 1..lat - 1 {
        for j in 0..res {
            faces.push([ring(k, j), ring(k + 1, j), ring(k + 1, j + 1)]);
            faces.push([ring(k, j), ring(k + 1, j + 1), ring(k, j + 1)]);
        }
    }
    Mesh::new(vertices, faces, format!("sphere r={r}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::IdealPoint;

    fn axis() -> Geodesic {
        Geodesic::new(
            &IdealPoint::new(vec![-1.0, 0.0], None).unwrap(),
            &IdealPoint::new(vec![1.0, 0.0], None).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn samples_cover_range() {
        assert_eq!(sweep_samples(0.0, 1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sweep_samples(0.0, 0.9, 0.5), vec![0.0, 0.5, 0.9]);
    }

    #[test]
    fn sphere_vertices_at_radius() {
        let g = Geodesic::from_angles(0.4, 2.0).unwrap();
        let m = geodesic_sphere_mesh(&g, 0.3, 0.5, 0.7, 12).unwrap();
        let c = BallPoint::new(g.point_at(0.3), 0.5).unwrap();
        for v in m.vertices() {
            assert!((v.distance(&c) - 0.7).abs() < 1e-12);
        }
        // Poles lie on g.
        assert!(g.distance_to(m.vertices()[0].x()) < 1e-9);
        assert!(g.distance_to(m.vertices().last().unwrap().x()) < 1e-9);
    }

    #[test]
    fn coincident_meshes_touch_at_start() {
        let g = axis();
        let m = geodesic_sphere_mesh(&g, 0.0, 0.0, 0.5, 8).unwrap();
        let r = sweep_contact(&m, &m, &g, (0.0, 1.0), 0.25, DEFAULT_CONTACT_TOL).unwrap();
        assert_eq!(r.status, SweepStatus::Contact);
        assert_eq!(r.contact, Some(0.0));
    }

    #[test]
    fn spheres_touch_at_center_gap() {
        let g = axis();
        let (r1, r2, d0) = (0.4, 0.3, 2.0);
        let fixed = geodesic_sphere_mesh(&g, 0.0, 0.0, r1, 16).unwrap();
        let moving = geodesic_sphere_mesh(&g, -d0, 0.0, r2, 16).unwrap();
        let res = sweep_contact(&moving, &fixed, &g, (0.0, 2.0), 0.05, DEFAULT_CONTACT_TOL).unwrap();
        let s = res.contact.unwrap();
        assert!((s - (d0 - r1 - r2)).abs() < 10.0 * DEFAULT_CONTACT_TOL, "{s}");
        assert!(res.contact_distance.unwrap() <= DEFAULT_CONTACT_TOL);
    }

    #[test]
    fn far_corridor_is_disjoint_or_exhausted() {
        let g = axis();
        let fixed = geodesic_sphere_mesh(&g, 0.0, 0.0, 0.3, 8).unwrap();
        let moving = geodesic_sphere_mesh(&g, 0.0, 3.0, 0.3, 8).unwrap();
        let r = sweep_contact(&moving, &fixed, &g, (-1.0, 1.0), 0.1, DEFAULT_CONTACT_TOL).unwrap();
        assert_eq!(r.status, SweepStatus::Disjoint);
        let r = sweep_contact(&moving, &fixed, &g, (-1.0, -0.5), 0.1, DEFAULT_CONTACT_TOL).unwrap();
        assert_eq!(r.status, SweepStatus::Exhausted);
        let empty = Mesh::new(vec![], vec![], "empty").unwrap();
        assert!(sweep_contact(&empty, &fixed, &g, (0.0, 1.0), 0.1, 1e-6).is_err());
    }

    #[test]
    fn clearance_of_reflection_is_negated() {
        let g = axis();
        let m = geodesic_sphere_mesh(&g, 1.0, 0.0, 0.3, 8).unwrap();
        let p = VerticalHyperplane::diameter(vec![1.0, 0.0], Side::Positive).unwrap();
        let (d, i) = halfspace_clearance(&m, &p, Side::Positive).unwrap();
        assert!((d - 0.7).abs() < 1e-9);
        let refl = m.reflected(&Mirror::Plane(p.clone()));
        let (dr, ir) = halfspace_clearance(&refl, &p, Side::Negative).unwrap();
        assert!((d - dr).abs() < 1e-12);
        assert_eq!(i, ir);
    }

    #[test]
    fn sphere_residual_about_its_slice() {
        let g = axis();
        let m = geodesic_sphere_mesh(&g, 0.0, 0.2, 0.3, 8).unwrap();
        assert!(reflect_residual(&m, &Mirror::Slice(0.2)).unwrap() < 1e-12);
        assert!(reflect_residual(&m, &Mirror::Slice(0.3)).unwrap() > 0.1);
    }
}
