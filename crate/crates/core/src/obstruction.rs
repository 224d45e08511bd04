//! Non-existence checks for minimal hypersurfaces of H^n x R with
//! prescribed asymptotic boundary.
//!
//! Each check tests the hypotheses of an obstruction at sampling resolution
//! and returns a [`Verdict`]. A verdict of `NoObstructionDetected` only says
//! that these hypotheses were not verified; it never asserts existence.

use crate::boundary::AsymptoticCurve;
use crate::error::{domain, Error, Result};
use crate::hull::convex_hull;
use crate::hyperbolic::vector::{self, dot, orthogonal_unit};
use crate::hyperbolic::angle_between;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Angular margin for omitted regions and boundary witnesses (2 degrees).
pub const DEFAULT_ANGLE_TOL: f64 = PI / 90.0;
/// Strictness margin relative to the sample's diameter.
pub const DEFAULT_CONV_TOL: f64 = 1e-9;
/// Margin below the critical slab height.
pub const SLAB_TOL: f64 = 1e-12;
const SPHERE_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Obstructed,
    NoObstructionDetected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    SlabAndProjection,
    AsymptoticTheorem,
    StrictConvexity,
    None,
}

impl Rule {
    /// The statement behind the rule.
    pub fn statement(self) -> &'static str {
        match self {
            Rule::SlabAndProjection => {
                "boundary data at infinity confined to a slab thinner than pi/(n-1), whose directions \
                 leave part of the ideal sphere of H^n uncovered, bounds no proper minimal hypersurface"
            }
            Rule::AsymptoticTheorem => {
                "if G fits in a slab thinner than pi/(n-1) and the rim of its projected directions \
                 contains a point coming from no boundary point of G, then G bounds no complete proper \
                 minimal hypersurface"
            }
            Rule::StrictConvexity => {
                "a strictly convex curve (Euclidean sense, half-space boundary coordinates) at infinity \
                 bounds no minimal surface of H^2 x R, and no horizontal minimal graph spans such data"
            }
            Rule::None => "no hypothesis of the available obstructions was verified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub rule: Rule,
    pub details: String,
}

impl Verdict {
    fn obstructed(rule: Rule, details: String) -> Self {
        Verdict {
            status: Status::Obstructed,
            rule,
            details,
        }
    }

    fn clear(details: String) -> Self {
        Verdict {
            status: Status::NoObstructionDetected,
            rule: Rule::None,
            details,
        }
    }

    pub fn is_obstructed(&self) -> bool {
        self.status == Status::Obstructed
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Obstructed => "obstructed",
            Status::NoObstructionDetected => "no_obstruction_detected",
        };
        let rule = serde_json::to_value(self.rule).ok();
        let rule = rule.as_ref().and_then(|v| v.as_str()).unwrap_or("none");
        writeln!(f, "status: {status}")?;
        writeln!(f, "rule: {rule}")?;
        writeln!(f, "statement: {}", self.rule.statement())?;
        write!(f, "details: {}", self.details)
    }
}

/// Tolerances shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckTolerances {
    pub angle_tol: f64,
    pub conv_tol: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        CheckTolerances {
            angle_tol: DEFAULT_ANGLE_TOL,
            conv_tol: DEFAULT_CONV_TOL,
        }
    }
}

fn check_dim(curve: &AsymptoticCurve, n: usize) -> Result<()> {
    if !(n == 2 || n == 3) {
        return Err(Error::UnsupportedDimension(n));
    }
    if curve.dim() != n {
        return domain(format!("curve lives in dimension {} but n = {n}", curve.dim()));
    }
    Ok(())
}

fn slab_height(n: usize) -> f64 {
    PI / (n as f64 - 1.0)
}

/// Projected edges of the curve as pairs of directions.
fn edges(curve: &AsymptoticCurve) -> Vec<(&[f64], &[f64])> {
    let v = curve.vertices();
    let count = v.len();
    let pairs = if curve.closed() && count > 1 { count } else { count.saturating_sub(1) };
    let mut out: Vec<(&[f64], &[f64])> = (0..pairs).map(|i| (v[i].u(), v[(i + 1) % count].u())).collect();
    if count == 1 {
        out.push((v[0].u(), v[0].u()));
    }
    out
}

/// Covered arcs of the circle, merged, as `(start, length)` with
/// `start` in `[0, 2 pi)`; `None` when the circle is covered.
/// Arcs closer than this (radians) are treated as touching.
const ARC_MERGE_TOL: f64 = 1e-12;

fn covered_arcs(curve: &AsymptoticCurve) -> Option<Vec<(f64, f64)>> {
    let tau = 2.0 * PI;
    let mut arcs: Vec<(f64, f64)> = edges(curve)
        .into_iter()
        .map(|(a, b)| {
            let ta = a[1].atan2(a[0]).rem_euclid(tau);
            let tb = b[1].atan2(b[0]).rem_euclid(tau);
            // Each edge projects to the shorter arc between its ends.
            let fwd = (tb - ta).rem_euclid(tau);
            if fwd <= PI {
                (ta, fwd)
            } else {
                (tb, tau - fwd)
            }
        })
        .collect();
    arcs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, l) in arcs {
        if let Some(last) = merged.last_mut() {
            if s <= last.0 + last.1 + ARC_MERGE_TOL {
                last.1 = last.1.max(s + l - last.0);
                continue;
            }
        }
        merged.push((s, l));
    }
    // Arcs crossing 2 pi may swallow the first ones.
    if merged.len() > 1 {
        let (ls, ll) = *merged.last().expect("non-empty");
        let mut end = ls + ll - tau;
        while merged.len() > 1 && merged[0].0 <= end + ARC_MERGE_TOL {
            let (fs, fl) = merged.remove(0);
            end = end.max(fs + fl);
            let last = merged.last_mut().expect("non-empty");
            last.1 = end + tau - last.0;
        }
    }
    if merged.iter().any(|&(_, l)| l >= tau - ARC_MERGE_TOL) {
        return None;
    }
    Some(merged)
}

/// Largest uncovered gap `(center angle, width)` between merged arcs.
fn largest_gap(arcs: &[(f64, f64)]) -> (f64, f64) {
    let tau = 2.0 * PI;
    let mut best = (0.0, 0.0);
    for (i, &(s, l)) in arcs.iter().enumerate() {
        let next = arcs[(i + 1) % arcs.len()].0;
        let end = s + l;
        let width = (next - end).rem_euclid(tau);
        let width = if arcs.len() == 1 { tau - l } else { width };
        if width > best.1 {
            best = ((end + 0.5 * width).rem_euclid(tau), width);
        }
    }
    best
}

/// Angular distance from `p` to the great-circle arc from `a` to `b`.
fn arc_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let c = cross3(a, b);
    let len = vector::norm(&c);
    let ends = angle_between(p, a).min(angle_between(p, b));
    if len < 1e-15 {
        return ends;
    }
    let nrm: Vec<f64> = c.iter().map(|x| x / len).collect();
    let h = dot(p, &nrm);
    let q: Vec<f64> = p.iter().zip(&nrm).map(|(x, y)| x - h * y).collect();
    let inside = dot(&cross3(a, &q), &nrm) >= 0.0 && dot(&cross3(&q, b), &nrm) >= 0.0;
    if inside && vector::norm(&q) > 0.0 {
        h.abs().clamp(0.0, 1.0).asin()
    } else {
        ends
    }
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn curve_distance(p: &[f64], e: &[(&[f64], &[f64])]) -> f64 {
    e.iter().map(|(a, b)| arc_distance(p, a, b)).fold(f64::INFINITY, f64::min)
}

fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            vec![r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

const MAX_MOVES_PER_STEP: usize = 32;

/// Direction of S^2 farthest from the projected curve, by grid search and
/// local refinement: `(direction, angular radius of the omitted cap)`.
fn farthest_direction(e: &[(&[f64], &[f64])]) -> (Vec<f64>, f64) {
    let grid = fibonacci_sphere(SPHERE_GRID);
    let (mut best, mut dist) = grid
        .iter()
        .map(|p| (p.clone(), curve_distance(p, e)))
        .fold((vec![0.0, 0.0, 1.0], -1.0), |b, c| if c.1 > b.1 { c } else { b });
    let mut step = (4.0 * PI / SPHERE_GRID as f64).sqrt();
    let mut moves = 0;
    while step > 1e-10 {
        let u = orthogonal_unit(&best);
        let w = cross3(&best, &u);
        let mut moved = false;
        for (cu, cw) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let cand: Vec<f64> = (0..3).map(|k| best[k] + step * (cu * u[k] + cw * w[k])).collect();
            let cand = vector::normalized(&cand).expect("non-zero");
            let d = curve_distance(&cand, e);
            if d > dist {
                best = cand;
                dist = d;
                moved = true;
                break;
            }
        }
        moves += 1;
        if !moved || moves >= MAX_MOVES_PER_STEP {
            step *= 0.5;
            moves = 0;
        }
    }
    (best, dist)
}

fn fmt_dir(u: &[f64]) -> String {
    let parts: Vec<String> = u.iter().map(|c| format!("{c:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Slab-and-projection rule.
pub fn check_slab_projection(curve: &AsymptoticCurve, n: usize) -> Result<Verdict> {
    check_slab_projection_with(curve, n, &CheckTolerances::default())
}

pub fn check_slab_projection_with(curve: &AsymptoticCurve, n: usize, tol: &CheckTolerances) -> Result<Verdict> {
    check_dim(curve, n)?;
    if !curve.closed() {
        return domain("the slab-and-projection rule needs a closed curve");
    }
    let (lo, hi) = curve.height_range();
    let slab = slab_height(n);
    let span = hi - lo;
    if !(span < slab - SLAB_TOL) {
        return Ok(Verdict::clear(format!(
            "height span {span:.12} over [{lo:.12}, {hi:.12}] is not below the slab height {slab:.12}"
        )));
    }
    let slab_text = format!("heights in [{lo:.12}, {hi:.12}], span {span:.12} < {slab:.12}");
    if n == 2 {
        match covered_arcs(curve) {
            None => Ok(Verdict::clear(format!("{slab_text}; the projection covers the whole circle"))),
            Some(arcs) => {
                let (center, width) = largest_gap(&arcs);
                if width > tol.angle_tol {
                    Ok(Verdict::obstructed(
                        Rule::SlabAndProjection,
                        format!(
                            "{slab_text}; projection omits the open arc of width {width:.12} rad centered at angle {center:.12}"
                        ),
                    ))
                } else {
                    Ok(Verdict::clear(format!(
                        "{slab_text}; largest omitted arc {width:.3e} rad is within the angular margin {:.3e}",
                        tol.angle_tol
                    )))
                }
            }
        }
    } else {
        let e = edges(curve);
        let (dir, radius) = farthest_direction(&e);
        if radius > tol.angle_tol {
            Ok(Verdict::obstructed(
                Rule::SlabAndProjection,
                format!(
                    "{slab_text}; projection omits the open cap of angular radius {radius:.12} centered at {}",
                    fmt_dir(&dir)
                ),
            ))
        } else {
            Ok(Verdict::clear(format!(
                "{slab_text}; largest omitted cap radius {radius:.3e} is within the angular margin {:.3e}",
                tol.angle_tol
            )))
        }
    }
}

/// Hypotheses of the asymptotic theorem for a curve with flagged boundary
/// vertices.
pub fn check_asymptotic_theorem(curve: &AsymptoticCurve, n: usize) -> Result<Verdict> {
    check_asymptotic_theorem_with(curve, n, &CheckTolerances::default())
}

pub fn check_asymptotic_theorem_with(curve: &AsymptoticCurve, n: usize, tol: &CheckTolerances) -> Result<Verdict> {
    check_dim(curve, n)?;
    let flagged: Vec<&[f64]> = curve
        .vertices()
        .iter()
        .zip(curve.boundary_flags())
        .filter(|(_, &b)| b)
        .map(|(v, _)| v.u())
        .collect();
    if !curve.closed() && flagged.is_empty() {
        return domain("an open curve needs flagged boundary vertices");
    }
    let (lo, hi) = curve.height_range();
    let slab = slab_height(n);
    let span = hi - lo;
    if !(span < slab - SLAB_TOL) {
        return Ok(Verdict::clear(format!(
            "height span {span:.12} does not fit in an open interval of length {slab:.12}"
        )));
    }
    // Sampled topological boundary of the projection.
    let candidates: Vec<Vec<f64>> = if n == 2 {
        match covered_arcs(curve) {
            None => Vec::new(),
            Some(arcs) => arcs
                .iter()
                .flat_map(|&(s, l)| [s, s + l])
                .map(|th| vec![th.cos(), th.sin()])
                .collect(),
        }
    } else {
        // A curve on S^2 has empty interior: its projection is its own
        // boundary, sampled along every projected edge.
        edges(curve)
            .into_iter()
            .flat_map(|(a, b)| {
                (0..8).map(move |k| {
                    let s = k as f64 / 8.0;
                    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect();
                    vector::normalized(&p).unwrap_or_else(|| a.to_vec())
                })
            })
            .collect()
    };
    let witness = candidates
        .iter()
        .map(|q| {
            let d = flagged.iter().map(|f| angle_between(q, f)).fold(f64::INFINITY, f64::min);
            (q, d)
        })
        .fold(None::<(&Vec<f64>, f64)>, |best, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        });
    match witness {
        Some((q, d)) if d > tol.angle_tol => Ok(Verdict::obstructed(
            Rule::AsymptoticTheorem,
            format!(
                "heights in [{lo:.12}, {hi:.12}] fit in an interval of length {slab:.12}; boundary direction q = {} of the projection lies at angle {} from every projected boundary vertex",
                fmt_dir(q),
                if d.is_finite() { format!("{d:.12}") } else { "inf (no boundary vertices)".to_string() }
            ),
        )),
        Some((_, d)) => Ok(Verdict::clear(format!(
            "every sampled boundary direction of the projection is within {d:.3e} of a projected boundary vertex"
        ))),
        None => Ok(Verdict::clear("the projection has empty boundary".to_string())),
    }
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(vector::dist2(p, q).sqrt());
        }
    }
    d
}

fn segments_cross(p1: &[f64], p2: &[f64], q1: &[f64], q2: &[f64]) -> bool {
    let orient = |a: &[f64], b: &[f64], c: &[f64]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let (d1, d2) = (orient(q1, q2, p1), orient(q1, q2, p2));
    let (d3, d4) = (orient(p1, p2, q1), orient(p1, p2, q2));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: &[f64], b: &[f64], c: &[f64], d: f64| {
        d == 0.0
            && c[0] >= a[0].min(b[0])
            && c[0] <= a[0].max(b[0])
            && c[1] >= a[1].min(b[1])
            && c[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Strict convexity of a closed sample in boundary coordinates
/// `R^{n-1} x R`: a polygon (`n = 2`) or a point cloud on a closed surface
/// (`n = 3`).
pub fn check_strict_convexity(points: &[Vec<f64>], n: usize) -> Result<Verdict> {
    check_strict_convexity_with(points, n, &CheckTolerances::default())
}

pub fn check_strict_convexity_with(points: &[Vec<f64>], n: usize, tol: &CheckTolerances) -> Result<Verdict> {
    if !(n == 2 || n == 3) {
        return Err(Error::UnsupportedDimension(n));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return domain(format!("sample point of dimension {} for n = {n}", p.len()));
    }
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return domain("sample coordinates must be finite");
    }
    let need = if n == 2 { 3 } else { 4 };
    if points.len() < need {
        return domain(format!("need at least {need} sample points, got {}", points.len()));
    }
    let diam = diameter(points);
    if !(diam > 0.0) {
        return domain("sample has zero diameter");
    }
    if n == 2 {
        convexity_2d(points, diam, tol)
    } else {
        convexity_3d(points, diam, tol)
    }
}

fn convexity_2d(p: &[Vec<f64>], diam: f64, tol: &CheckTolerances) -> Result<Verdict> {
    let m = p.len();
    for i in 0..m {
        for j in i + 1..m {
            // Adjacent edges share a vertex and are skipped.
            if j == i + 1 || (i == 0 && j == m - 1) {
                continue;
            }
            if segments_cross(&p[i], &p[(i + 1) % m], &p[j], &p[(j + 1) % m]) {
                return domain(format!("sample self-intersects: edges {i} and {j} meet"));
            }
        }
    }
    let turns: Vec<f64> = (0..m)
        .map(|i| {
            let (a, b, c) = (&p[i], &p[(i + 1) % m], &p[(i + 2) % m]);
            ((b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])) / (diam * diam)
        })
        .collect();
    let (imin, min_abs) = turns
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.abs()))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    let positive = turns.iter().filter(|&&t| t > 0.0).count();
    let consistent = positive == m || positive == 0;
    if consistent && min_abs > tol.conv_tol {
        Ok(Verdict::obstructed(
            Rule::StrictConvexity,
            format!(
                "all {m} turning cross-products share one sign; smallest |cross|/diam^2 = {min_abs:.6e} at vertex {} (margin {:.1e})",
                (imin + 1) % m,
                tol.conv_tol
            ),
        ))
    } else if !consistent {
        Ok(Verdict::clear(format!(
            "turning cross-products change sign ({positive} positive of {m})"
        )))
    } else {
        Ok(Verdict::clear(format!(
            "turn at vertex {} has |cross|/diam^2 = {min_abs:.3e}, not above the margin {:.1e}",
            (imin + 1) % m,
            tol.conv_tol
        )))
    }
}

fn convexity_3d(p: &[Vec<f64>], diam: f64, tol: &CheckTolerances) -> Result<Verdict> {
    let pts: Vec<[f64; 3]> = p.iter().map(|v| [v[0], v[1], v[2]]).collect();
    let Some(hull) = convex_hull(&pts, 1e-12 * diam) else {
        return Ok(Verdict::clear("sample is coplanar".to_string()));
    };
    let mut on_hull = vec![false; pts.len()];
    for f in &hull {
        for &v in &f.v {
            on_hull[v] = true;
        }
    }
    if let Some(i) = on_hull.iter().position(|&h| !h) {
        return Ok(Verdict::clear(format!("sample point {i} is not an extreme point of the hull")));
    }
    let mut worst = (f64::INFINITY, 0usize, 0usize);
    for (k, f) in hull.iter().enumerate() {
        for (i, q) in pts.iter().enumerate() {
            if f.v.contains(&i) {
                continue;
            }
            let depth = -f.height(*q) / diam;
            if depth < worst.0 {
                worst = (depth, k, i);
            }
        }
    }
    if worst.0 > tol.conv_tol {
        Ok(Verdict::obstructed(
            Rule::StrictConvexity,
            format!(
                "all {} points are hull vertices; smallest facet offset {:.6e} of the diameter (point {} below facet {})",
                pts.len(),
                worst.0,
                worst.2,
                worst.1
            ),
        ))
    } else {
        Ok(Verdict::clear(format!(
            "point {} sits at relative offset {:.3e} from a hull facet, not above the margin {:.1e}",
            worst.2, worst.0, tol.conv_tol
        )))
    }
}

/// Stereographic coordinates in `R^{n-1} x R` of the curve's vertices,
/// projecting `S^{n-1}` from `pole`.
pub fn boundary_coordinates(curve: &AsymptoticCurve, pole: &[f64]) -> Result<Vec<Vec<f64>>> {
    let pole = vector::normalized(pole).ok_or_else(|| Error::Domain("pole must be non-zero".into()))?;
    if pole.len() != curve.dim() {
        return domain("pole dimension differs from the curve's");
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..pole.len() {
        let mut e = vec![0.0; pole.len()];
        e[k] = 1.0;
        for b in std::iter::once(&pole).chain(basis.iter()) {
            let c = dot(&e, b);
            e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        if let Some(e) = vector::normalized(&e) {
            if vector::norm(&e) > 0.5 {
                basis.push(e);
            }
        }
        if basis.len() + 1 == pole.len() {
            break;
        }
    }
    curve
        .vertices()
        .iter()
        .map(|v| {
            let u = v.u();
            let denom = 1.0 - dot(u, &pole);
            if denom < 1e-12 {
                return domain("a vertex sits at the projection pole");
            }
            let mut c: Vec<f64> = basis.iter().map(|b| dot(u, b) / denom).collect();
            c.push(v.t().expect("validated height"));
            Ok(c)
        })
        .collect()
}

/// A pole for [`boundary_coordinates`] away from the curve: the middle of
/// the largest omitted arc (`n = 2`), the farthest direction (`n = 3`).
pub fn default_pole(curve: &AsymptoticCurve) -> Vec<f64> {
    if curve.dim() == 2 {
        match covered_arcs(curve) {
            Some(arcs) => {
                let (c, _) = largest_gap(&arcs);
                vec![c.cos(), c.sin()]
            }
            None => {
                let v = curve.vertices()[0].u();
                vec![-v[0], -v[1]]
            }
        }
    } else if curve.dim() == 3 {
        farthest_direction(&edges(curve)).0
    } else {
        let mut p = vec![0.0; curve.dim()];
        p[0] = 1.0;
        p
    }
}
