//! Triangulated samples of hypersurfaces of H^n x R and distances between
//! them in the product metric.
//!
//! A triangle is the coordinate-flat simplex spanned by its three vertices in
//! `(x, t)` coordinates. Point-to-triangle distances are computed by
//! branch-and-bound over 2-D subdivisions: vertex and centroid distances give
//! upper bounds, and the Lipschitz constant of the product metric with
//! respect to coordinates gives lower bounds.

use crate::error::{domain, Result};
use crate::hyperbolic::{dist_unchecked, golden_min, BallPoint, Mirror, Translation};
use rayon::prelude::*;
use std::collections::{BTreeSet, BinaryHeap};

/// Minimum coordinate area of a face.
pub const MIN_FACE_AREA: f64 = 1e-14;
/// Absolute accuracy of point-to-triangle distances.
pub const DISTANCE_TOL: f64 = 1e-8;
const MAX_SUBDIVISIONS: usize = 96;
const POLISH_SEEDS: usize = 3;
/// Edge pairs whose locally Euclidean closest points fall this far outside
/// both segments are left to the vertex-to-triangle pass.
const INTERIOR_MARGIN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<BallPoint>,
    faces: Vec<[usize; 3]>,
    label: String,
}

impl Mesh {
    pub fn new(vertices: Vec<BallPoint>, faces: Vec<[usize; 3]>, label: impl Into<String>) -> Result<Self> {
        if let Some(first) = vertices.first() {
            let n = first.dim();
            if let Some(i) = vertices.iter().position(|v| v.dim() != n) {
                return domain(format!("vertex {i} has dimension {} instead of {n}", vertices[i].dim()));
            }
        }
        for (k, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= vertices.len()) {
                return domain(format!("face {k} references vertex {bad} of {}", vertices.len()));
            }
            let area = face_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
            if !(area > MIN_FACE_AREA) {
                return domain(format!("face {k} is degenerate (area {area:e})"));
            }
        }
        Ok(Mesh {
            vertices,
            faces,
            label: label.into(),
        })
    }

    pub fn vertices(&self) -> &[BallPoint] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the hyperbolic factor, `None` for an empty mesh.
    pub fn dim(&self) -> Option<usize> {
        self.vertices.first().map(BallPoint::dim)
    }

    /// Image under an isometry; faces and label are kept.
    pub fn mapped(&self, f: impl Fn(&BallPoint) -> BallPoint + Sync + Send) -> Mesh {
        Mesh {
            vertices: self.vertices.par_iter().map(f).collect(),
            faces: self.faces.clone(),
            label: self.label.clone(),
        }
    }

    pub fn reflected(&self, mirror: &Mirror) -> Mesh {
        self.mapped(|p| mirror.reflect_unchecked(p))
    }

    pub fn translated(&self, tr: &Translation) -> Mesh {
        self.mapped(|p| tr.apply_point(p))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Mesh {
        self.label = label.into();
        self
    }
}

fn coords(p: &BallPoint) -> Vec<f64> {
    let mut c = p.x().to_vec();
    c.push(p.t());
    c
}

fn face_area(a: &BallPoint, b: &BallPoint, c: &BallPoint) -> f64 {
    let (a, b, c) = (coords(a), coords(b), coords(c));
    let e1: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
    let e2: Vec<f64> = c.iter().zip(&a).map(|(x, y)| x - y).collect();
    let d11: f64 = e1.iter().map(|x| x * x).sum();
    let d22: f64 = e2.iter().map(|x| x * x).sum();
    let d12: f64 = e1.iter().zip(&e2).map(|(x, y)| x * y).sum();
    0.5 * (d11 * d22 - d12 * d12).max(0.0).sqrt()
}

/// Product-metric distance between coordinate vectors `(x, t)`.
#[inline]
fn dist2_prefix(p: &[f64], q: &[f64], n: usize) -> f64 {
    p[..n].iter().zip(&q[..n]).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn product_dist(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len() - 1;
    dist_unchecked(&p[..n], &q[..n]).hypot(p[n] - q[n])
}

/// A (sub)triangle in coordinates with the data needed for cheap lower
/// bounds. `bary` holds the corners' `(α, β)` in the root triangle
/// `V0 + α (V1 - V0) + β (V2 - V0)`.
#[derive(Debug, Clone)]
struct Tri {
    v: [Vec<f64>; 3],
    bary: [[f64; 2]; 3],
    centroid: Vec<f64>,
    radius: f64,
    lipschitz: f64,
}

impl Tri {
    fn root(v: [Vec<f64>; 3]) -> Self {
        Tri::new(v, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    }

    fn new(v: [Vec<f64>; 3], bary: [[f64; 2]; 3]) -> Self {
        let dim = v[0].len();
        let centroid: Vec<f64> = (0..dim).map(|k| (v[0][k] + v[1][k] + v[2][k]) / 3.0).collect();
        let radius = v
            .iter()
            .map(|p| p.iter().zip(&centroid).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let n = dim - 1;
        let r2 = v
            .iter()
            .map(|p| p[..n].iter().map(|c| c * c).sum::<f64>())
            .fold(0.0, f64::max);
        // |ds| <= max(2 / (1 - |x|^2), 1) |d(x, t)| on the convex hull.
        let lipschitz = (2.0 / (1.0 - r2)).max(1.0);
        Tri {
            v,
            bary,
            centroid,
            radius,
            lipschitz,
        }
    }

    fn centroid_bary(&self) -> [f64; 2] {
        let b = &self.bary;
        [(b[0][0] + b[1][0] + b[2][0]) / 3.0, (b[0][1] + b[1][1] + b[2][1]) / 3.0]
    }

    fn lower_bound(&self, p: &[f64]) -> f64 {
        product_dist(p, &self.centroid) - self.lipschitz * self.radius
    }

    fn split(&self) -> [Tri; 4] {
        let mid = |i: usize, j: usize| -> (Vec<f64>, [f64; 2]) {
            (
                self.v[i].iter().zip(&self.v[j]).map(|(a, b)| 0.5 * (a + b)).collect(),
                [
                    0.5 * (self.bary[i][0] + self.bary[j][0]),
                    0.5 * (self.bary[i][1] + self.bary[j][1]),
                ],
            )
        };
        let (m01, b01) = mid(0, 1);
        let (m12, b12) = mid(1, 2);
        let (m20, b20) = mid(2, 0);
        let [v0, v1, v2] = self.v.clone();
        let [c0, c1, c2] = self.bary;
        [
            Tri::new([v0, m01.clone(), m20.clone()], [c0, b01, b20]),
            Tri::new([m01.clone(), v1, m12.clone()], [b01, c1, b12]),
            Tri::new([m20.clone(), m12.clone(), v2], [b20, b12, c2]),
            Tri::new([m01, m12, m20], [b01, b12, b20]),
        ]
    }
}

struct Candidate {
    lb: f64,
    tri: Tri,
}

impl PartialEq for Candidate {
    fn eq(&self, o: &Self) -> bool {
        self.lb == o.lb
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Candidate {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.lb.total_cmp(&self.lb)
    }
}

/// Distance from `p` to the point of `root` with coordinates `b`.
fn bary_dist(p: &[f64], root: &Tri, b: [f64; 2]) -> f64 {
    let [v0, v1, v2] = &root.v;
    let y: Vec<f64> = (0..v0.len())
        .map(|k| v0[k] + b[0] * (v1[k] - v0[k]) + b[1] * (v2[k] - v0[k]))
        .collect();
    product_dist(p, &y)
}

/// Nearest point of the closed standard simplex to `b` in the `(α, β)` plane.
fn project_simplex(b: [f64; 2]) -> [f64; 2] {
    if b[0] >= 0.0 && b[1] >= 0.0 && b[0] + b[1] <= 1.0 {
        return b;
    }
    let on_edges = [
        [b[0].clamp(0.0, 1.0), 0.0],
        [0.0, b[1].clamp(0.0, 1.0)],
        {
            let a = (0.5 * (b[0] - b[1] + 1.0)).clamp(0.0, 1.0);
            [a, 1.0 - a]
        },
    ];
    on_edges
        .into_iter()
        .min_by(|p, q| {
            let dp = (p[0] - b[0]).hypot(p[1] - b[1]);
            let dq = (q[0] - b[0]).hypot(q[1] - b[1]);
            dp.total_cmp(&dq)
        })
        .expect("three candidates")
}

/// Feasible parameter interval of `b + s dir` inside the simplex.
fn simplex_interval(b: [f64; 2], dir: [f64; 2]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    // Constraints c . x <= k, written as (c, k).
    for (c, k) in [([-1.0, 0.0], 0.0), ([0.0, -1.0], 0.0), ([1.0, 1.0], 1.0)] {
        let rate = c[0] * dir[0] + c[1] * dir[1];
        let slack = k - (c[0] * b[0] + c[1] * b[1]);
        if rate > 0.0 {
            hi = hi.min(slack / rate);
        } else if rate < 0.0 {
            lo = lo.max(slack / rate);
        }
    }
    (lo.min(0.0), hi.max(0.0))
}

/// Projected Newton descent from `start`, with finite-difference
/// derivatives and a backtracking safeguard.
fn polish(p: &[f64], root: &Tri, start: [f64; 2]) -> f64 {
    let f = |b: [f64; 2]| bary_dist(p, root, b);
    let mut b = start;
    let mut fb = f(b);
    let h = 1e-6;
    for _ in 0..100 {
        let (fxp, fxm) = (f([b[0] + h, b[1]]), f([b[0] - h, b[1]]));
        let (fyp, fym) = (f([b[0], b[1] + h]), f([b[0], b[1] - h]));
        let fxy = f([b[0] + h, b[1] + h]) - fxp - fyp + fb;
        let g = [(fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h)];
        let (hxx, hyy, hxy) = ((fxp - 2.0 * fb + fxm) / (h * h), (fyp - 2.0 * fb + fym) / (h * h), fxy / (h * h));
        let det = hxx * hyy - hxy * hxy;
        let newton = (hxx > 0.0 && det > 0.0)
            .then(|| [-(hyy * g[0] - hxy * g[1]) / det, -(hxx * g[1] - hxy * g[0]) / det]);
        // Newton first; projected gradient when Newton's projection stalls
        // against an edge of the simplex.
        let mut improved = false;
        for start in newton.into_iter().chain(std::iter::once([-g[0], -g[1]])) {
            let mut dir = start;
            for _ in 0..40 {
                let trial = project_simplex([b[0] + dir[0], b[1] + dir[1]]);
                let ft = f(trial);
                if ft < fb {
                    improved = (trial[0] - b[0]).hypot(trial[1] - b[1]) > 1e-13;
                    b = trial;
                    fb = ft;
                    break;
                }
                dir = [0.5 * dir[0], 0.5 * dir[1]];
            }
            if improved {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    // Line searches along the edge directions settle minima on the
    // boundary and in narrow valleys.
    for _ in 0..30 {
        let before = fb;
        for dir in [[1.0, 0.0], [0.0, 1.0], [1.0, -1.0]] {
            let (lo, hi) = simplex_interval(b, dir);
            if hi - lo <= 0.0 {
                continue;
            }
            let line = |s: f64| f([b[0] + s * dir[0], b[1] + s * dir[1]]);
            let (s, fs) = golden_min(line, lo, hi, 1e-12);
            for (s, fs) in [(s, fs), (lo, line(lo)), (hi, line(hi))] {
                if fs < fb {
                    b = project_simplex([b[0] + s * dir[0], b[1] + s * dir[1]]);
                    fb = fs;
                }
            }
        }
        if !(fb < before - 1e-15 * before.max(1e-300)) {
            break;
        }
    }
    fb
}

/// Distance from `p` to `tri` if it is below `cutoff`, else `cutoff`.
///
/// Branch-and-bound over subdivisions until the bounds agree to `tol` or the
/// split budget runs out; the most promising candidates are then polished
/// by a local descent, which recovers flat interior minima that first-order
/// bounds converge to only slowly.
fn point_triangle(p: &[f64], tri: &Tri, cutoff: f64, tol: f64) -> f64 {
    let mut best = cutoff;
    let mut best_bary = None;
    for (v, b) in tri.v.iter().zip(&tri.bary) {
        let d = product_dist(p, v);
        if d < best {
            best = d;
            best_bary = Some(*b);
        }
    }
    if tri.lower_bound(p) >= best - tol {
        return best;
    }
    let dc = product_dist(p, &tri.centroid);
    if dc < best {
        best = dc;
        best_bary = Some(tri.centroid_bary());
    }
    let mut heap = BinaryHeap::new();
    heap.push(Candidate {
        lb: tri.lower_bound(p),
        tri: tri.clone(),
    });
    let mut splits = 0;
    let mut certified = false;
    while let Some(c) = heap.pop() {
        if c.lb >= best - tol {
            certified = true;
            break;
        }
        if splits >= MAX_SUBDIVISIONS {
            heap.push(c);
            break;
        }
        splits += 1;
        for child in c.tri.split() {
            let d = product_dist(p, &child.centroid);
            if d < best {
                best = d;
                best_bary = Some(child.centroid_bary());
            }
            let lb = child.lower_bound(p);
            if lb < best - tol {
                heap.push(Candidate { lb, tri: child });
            }
        }
    }
    if heap.is_empty() {
        certified = true;
    }
    if !certified {
        let mut seeds: Vec<[f64; 2]> = best_bary.into_iter().collect();
        for _ in 0..POLISH_SEEDS {
            match heap.pop() {
                Some(c) if c.lb < best - tol => seeds.push(c.tri.centroid_bary()),
                _ => break,
            }
        }
        for s in seeds {
            best = best.min(polish(p, tri, s));
        }
    }
    best
}

/// Precomputed triangle data of a mesh for repeated distance queries.
pub struct DistanceField<'a> {
    mesh: &'a Mesh,
    coords: Vec<Vec<f64>>,
    tris: Vec<Tri>,
}

impl<'a> DistanceField<'a> {
    pub fn new(mesh: &'a Mesh) -> Self {
        let coords: Vec<Vec<f64>> = mesh.vertices.iter().map(coords).collect();
        let tris = mesh
            .faces
            .iter()
            .map(|f| Tri::root([coords[f[0]].clone(), coords[f[1]].clone(), coords[f[2]].clone()]))
            .collect();
        DistanceField { mesh, coords, tris }
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    /// Distance from a point to the mesh (vertices and faces), to
    /// [`DISTANCE_TOL`]; values above `cutoff` are reported as `cutoff`.
    pub fn distance_below(&self, p: &BallPoint, cutoff: f64) -> f64 {
        let pc = coords(p);
        let mut best = cutoff;
        for c in &self.coords {
            if best <= 0.0 {
                return 0.0;
            }
            // The ball metric is at least twice the Euclidean one.
            let n = pc.len() - 1;
            let dt = pc[n] - c[n];
            let bound = 4.0 * dist2_prefix(&pc, c, n) + dt * dt;
            if bound < best * best {
                best = best.min(product_dist(&pc, c));
            }
        }
        for tri in &self.tris {
            if tri.lower_bound(&pc) < best - DISTANCE_TOL {
                best = point_triangle(&pc, tri, best, DISTANCE_TOL);
            }
        }
        best
    }

    pub fn distance(&self, p: &BallPoint) -> f64 {
        self.distance_below(p, f64::INFINITY)
    }
}

fn unique_edges(m: &Mesh) -> Vec<[usize; 2]> {
    let set: BTreeSet<[usize; 2]> = m
        .faces
        .iter()
        .flat_map(|f| [[f[0], f[1]], [f[1], f[2]], [f[2], f[0]]])
        .map(|[i, j]| [i.min(j), i.max(j)])
        .collect();
    set.into_iter().collect()
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn ball_lipschitz(points: &[&[f64]]) -> f64 {
    let r2 = points
        .iter()
        .map(|p| p[..p.len() - 1].iter().map(|c| c * c).sum::<f64>())
        .fold(0.0, f64::max);
    (2.0 / (1.0 - r2)).max(1.0)
}

/// Closest-point parameters of the lines through `[p0, p1]` and `[q0, q1]`
/// after scaling the ball coordinates by `k`, or `None` for parallel lines.
fn line_parameters(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64], k: f64) -> Option<[f64; 2]> {
    let n = p0.len() - 1;
    let w = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).enumerate().map(|(i, (x, y))| if i < n { k * (x - y) } else { x - y }).collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (d1, d2, r) = (w(p1, p0), w(q1, q0), w(p0, q0));
    let (a, b, c) = (dot(&d1, &d1), dot(&d1, &d2), dot(&d2, &d2));
    let (d, e) = (dot(&d1, &r), dot(&d2, &r));
    let den = a * c - b * b;
    if den <= 1e-12 * a * c {
        return None;
    }
    Some([(b * e - c * d) / den, (a * e - b * d) / den])
}

/// Interior minimum of the distance between the coordinate segments
/// `[p0, p1]` and `[q0, q1]`, by projected Newton steps in the unit square
/// from `start`. Minima on the boundary are point-to-segment distances,
/// which the vertex-to-triangle pass already covers.
fn segment_distance(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64], start: [f64; 2]) -> f64 {
    let f = |x: [f64; 2]| product_dist(&lerp(p0, p1, x[0]), &lerp(q0, q1, x[1]));
    let clamp = |x: [f64; 2]| [x[0].clamp(0.0, 1.0), x[1].clamp(0.0, 1.0)];
    let mut x = clamp(start);
    let mut fx = f(x);
    let h = 1e-6;
    for _ in 0..60 {
        let (fsp, fsm) = (f([x[0] + h, x[1]]), f([x[0] - h, x[1]]));
        let (fup, fum) = (f([x[0], x[1] + h]), f([x[0], x[1] - h]));
        let fsu = f([x[0] + h, x[1] + h]) - fsp - fup + fx;
        let g = [(fsp - fsm) / (2.0 * h), (fup - fum) / (2.0 * h)];
        let (hss, huu, hsu) = ((fsp - 2.0 * fx + fsm) / (h * h), (fup - 2.0 * fx + fum) / (h * h), fsu / (h * h));
        let det = hss * huu - hsu * hsu;
        let newton = (hss > 0.0 && det > 0.0).then(|| [-(huu * g[0] - hsu * g[1]) / det, -(hss * g[1] - hsu * g[0]) / det]);
        let mut improved = false;
        for start in newton.into_iter().chain(std::iter::once([-g[0], -g[1]])) {
            let mut dir = start;
            for _ in 0..40 {
                let trial = clamp([x[0] + dir[0], x[1] + dir[1]]);
                let ft = f(trial);
                if ft < fx {
                    improved = (trial[0] - x[0]).hypot(trial[1] - x[1]) > 1e-13;
                    x = trial;
                    fx = ft;
                    break;
                }
                dir = [0.5 * dir[0], 0.5 * dir[1]];
            }
            if improved {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    fx
}

/// Smallest edge-to-edge distance if below `cutoff`, else `cutoff`.
fn edge_distance(ca: &[Vec<f64>], ea: &[[usize; 2]], cb: &[Vec<f64>], eb: &[[usize; 2]], cutoff: f64) -> f64 {
    let mut cand: Vec<(f64, usize, usize)> = ea
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, e)| {
            let (p0, p1) = (&ca[e[0]], &ca[e[1]]);
            let pm = lerp(p0, p1, 0.5);
            let hp = 0.5 * euclid(p0, p1);
            eb.iter().enumerate().filter_map(move |(j, f)| {
                let (q0, q1) = (&cb[f[0]], &cb[f[1]]);
                let qm = lerp(q0, q1, 0.5);
                let l = ball_lipschitz(&[p0, p1, q0, q1]);
                let lb = product_dist(&pm, &qm) - l * (hp + 0.5 * euclid(q0, q1));
                (lb < cutoff - DISTANCE_TOL).then_some((lb, i, j))
            })
        })
        .collect();
    cand.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = cutoff;
    for (lb, i, j) in cand {
        if lb >= best - DISTANCE_TOL || best <= 0.0 {
            break;
        }
        let (e, f) = (ea[i], eb[j]);
        let (p0, p1, q0, q1) = (&ca[e[0]], &ca[e[1]], &cb[f[0]], &cb[f[1]]);
        // Local conformal factor of the ball coordinates.
        let mid = lerp(&lerp(p0, p1, 0.5), &lerp(q0, q1, 0.5), 0.5);
        let r2: f64 = mid[..mid.len() - 1].iter().map(|c| c * c).sum();
        let start = match line_parameters(p0, p1, q0, q1, 2.0 / (1.0 - r2)) {
            Some(x) if x.iter().all(|v| (-INTERIOR_MARGIN..=1.0 + INTERIOR_MARGIN).contains(v)) => x,
            Some(_) => continue,
            None => [0.5, 0.5],
        };
        best = best.min(segment_distance(p0, p1, q0, q1, start));
    }
    best
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Whether the segment `[p0, p1]` meets the triangle `v` in `R^3`.
fn segment_hits_triangle(p0: &[f64], p1: &[f64], v: [&[f64]; 3]) -> bool {
    let sub = |a: &[f64], b: &[f64]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let (e1, e2, d) = (sub(v[1], v[0]), sub(v[2], v[0]), sub(p1, p0));
    let h = cross3(&d, &e2);
    let det = dot3(&e1, &h);
    let scale = dot3(&e1, &e1).sqrt() * dot3(&e2, &e2).sqrt() * dot3(&d, &d).sqrt();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let s = sub(p0, v[0]);
    let u = dot3(&s, &h) / det;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = cross3(&s, &e1);
    let w = dot3(&d, &q) / det;
    if w < 0.0 || u + w > 1.0 {
        return false;
    }
    (0.0..=1.0).contains(&(dot3(&e2, &q) / det))
}

fn bbox(points: &[&[f64]]) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Whether an edge of one mesh passes through a face of the other, for
/// meshes in three coordinates.
fn surfaces_cross(ca: &[Vec<f64>], ea: &[[usize; 2]], cb: &[Vec<f64>], fb: &[[usize; 3]]) -> bool {
    let boxes: Vec<([f64; 3], [f64; 3])> = fb.iter().map(|f| bbox(&[&cb[f[0]], &cb[f[1]], &cb[f[2]]])).collect();
    ea.par_iter().any(|e| {
        let (p0, p1) = (&ca[e[0]], &ca[e[1]]);
        let (lo, hi) = bbox(&[p0, p1]);
        fb.iter().zip(&boxes).any(|(f, (flo, fhi))| {
            (0..3).all(|k| lo[k] <= fhi[k] && flo[k] <= hi[k])
                && segment_hits_triangle(p0, p1, [&cb[f[0]], &cb[f[1]], &cb[f[2]]])
        })
    })
}

/// Distance between two meshes: vertex-to-triangle in both directions and
/// edge-to-edge, and zero when the meshes cross (checked for meshes in
/// `H^2 x R`, whose coordinates are three-dimensional).
pub fn mesh_distance(a: &Mesh, b: &Mesh) -> f64 {
    let fa = DistanceField::new(a);
    let fb = DistanceField::new(b);
    let (ea, eb) = (unique_edges(a), unique_edges(b));
    if fa.coords.first().is_some_and(|c| c.len() == 3)
        && (surfaces_cross(&fa.coords, &ea, &fb.coords, &b.faces) || surfaces_cross(&fb.coords, &eb, &fa.coords, &a.faces))
    {
        return 0.0;
    }
    // Vertex pairs give an upper bound that prunes most triangle work.
    let pairs = fa
        .coords
        .par_iter()
        .map(|p| fb.coords.iter().map(|q| product_dist(p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    let ab = a
        .vertices
        .par_iter()
        .map(|v| fb.distance_below(v, pairs))
        .reduce(|| f64::INFINITY, f64::min);
    let ba = b
        .vertices
        .par_iter()
        .map(|v| fa.distance_below(v, ab))
        .reduce(|| f64::INFINITY, f64::min);
    edge_distance(&fa.coords, &ea, &fb.coords, &eb, ab.min(ba))
}

/// Two-sided Hausdorff-type distance: the largest distance from a vertex of
/// either mesh to the other mesh.
pub fn vertex_hausdorff(a: &Mesh, b: &Mesh) -> f64 {
    let fa = DistanceField::new(a);
    let fb = DistanceField::new(b);
    let ab = a
        .vertices
        .par_iter()
        .map(|v| fb.distance(v))
        .reduce(|| 0.0, f64::max);
    let ba = b
        .vertices
        .par_iter()
        .map(|v| fa.distance(v))
        .reduce(|| 0.0, f64::max);
    ab.max(ba)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(x: f64, y: f64, t: f64) -> BallPoint {
        BallPoint::new(vec![x, y], t).unwrap()
    }

    fn flat_triangle() -> Mesh {
        Mesh::new(
            vec![bp(-0.2, -0.2, 0.0), bp(0.3, -0.2, 0.0), bp(0.0, 0.3, 0.0)],
            vec![[0, 1, 2]],
            "tri",
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let v = vec![bp(0.0, 0.0, 0.0), bp(0.1, 0.0, 0.0), bp(0.2, 0.0, 0.0)];
        assert!(Mesh::new(v.clone(), vec![[0, 1, 2]], "collinear").is_err());
        assert!(Mesh::new(v.clone(), vec![[0, 1, 3]], "index").is_err());
        assert!(Mesh::new(v, vec![], "cloud").is_ok());
        let mixed = vec![bp(0.0, 0.0, 0.0), BallPoint::new(vec![0.0, 0.0, 0.0], 0.0).unwrap()];
        assert!(Mesh::new(mixed, vec![], "mixed").is_err());
    }

    #[test]
    fn point_above_triangle_interior() {
        // The triangle lies in the slice t = 0; a point straight above an
        // interior point is at vertical distance from it.
        let m = flat_triangle();
        let field = DistanceField::new(&m);
        let d = field.distance(&bp(0.0, 0.0, 0.25));
        assert!((d - 0.25).abs() < DISTANCE_TOL, "{d}");
    }

    #[test]
    fn point_in_plane_of_triangle_beyond_edge() {
        // Oracle: dense barycentric sampling.
        let m = flat_triangle();
        let field = DistanceField::new(&m);
        let p = bp(0.05, -0.5, 0.1);
        let d = field.distance(&p);
        let vs: Vec<Vec<f64>> = m.vertices().iter().map(coords).collect();
        let pc = coords(&p);
        let brute = brute_triangle(&pc, &vs, 400);
        assert!(d <= brute + 1e-12);
        assert!(brute - d < 1e-5, "{d} vs {brute}");
    }

    fn brute_triangle(p: &[f64], vs: &[Vec<f64>], k: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..=k {
            for j in 0..=(k - i) {
                let (a, b) = (i as f64 / k as f64, j as f64 / k as f64);
                let c = 1.0 - a - b;
                let q: Vec<f64> = (0..vs[0].len()).map(|r| a * vs[0][r] + b * vs[1][r] + c * vs[2][r]).collect();
                best = best.min(product_dist(p, &q));
            }
        }
        best
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn point_triangle_matches_dense_sampling(
            c in proptest::collection::vec(-0.45f64..0.45, 9),
            q in proptest::collection::vec(-0.6f64..0.6, 3),
        ) {
            let v = |i: usize| bp(c[3 * i], c[3 * i + 1], c[3 * i + 2]);
            let m = match Mesh::new(vec![v(0), v(1), v(2)], vec![[0, 1, 2]], "t") {
                Ok(m) => m,
                Err(_) => return Ok(()),
            };
            let p = bp(q[0], q[1], q[2]);
            let d = DistanceField::new(&m).distance(&p);
            let vs: Vec<Vec<f64>> = m.vertices().iter().map(coords).collect();
            let k = 300;
            let brute = brute_triangle(&coords(&p), &vs, k);
            // Grid spacing times the metric's Lipschitz constant bounds the
            // sampling error of the oracle.
            let tri = Tri::root([vs[0].clone(), vs[1].clone(), vs[2].clone()]);
            let slack = tri.lipschitz * 2.0 * tri.radius / k as f64;
            proptest::prop_assert!(d <= brute + 1e-12, "{} > {}", d, brute);
            proptest::prop_assert!(brute - d <= slack, "{} vs {}", d, brute);
        }
    }

    #[test]
    fn distance_is_zero_on_vertices() {
        let m = flat_triangle();
        assert_eq!(mesh_distance(&m, &m), 0.0);
        assert_eq!(vertex_hausdorff(&m, &m), 0.0);
    }
}
