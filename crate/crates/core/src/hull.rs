//! Incremental convex hull of points in R^3.

use std::collections::HashSet;

#[derive(Debug, Clone)]
pub struct Facet {
    pub v: [usize; 3],
    /// Outward unit normal.
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Facet {
    fn new(points: &[[f64; 3]], v: [usize; 3]) -> Option<Self> {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let n = cross(sub(b, a), sub(c, a));
        let len = dot(n, n).sqrt();
        if len == 0.0 {
            return None;
        }
        let normal = [n[0] / len, n[1] / len, n[2] / len];
        Some(Facet {
            v,
            normal,
            offset: dot(normal, a),
        })
    }

    /// Signed height of `p` above the facet plane.
    pub fn height(&self, p: [f64; 3]) -> f64 {
        dot(self.normal, p) - self.offset
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Facets of the hull, or `None` when all points are (nearly) coplanar.
/// `eps` is the absolute visibility threshold.
pub fn convex_hull(points: &[[f64; 3]], eps: f64) -> Option<Vec<Facet>> {
    if points.len() < 4 {
        return None;
    }
    let i0 = 0;
    let i1 = (1..points.len()).max_by(|&i, &j| {
        let di = dot(sub(points[i], points[i0]), sub(points[i], points[i0]));
        let dj = dot(sub(points[j], points[i0]), sub(points[j], points[i0]));
        di.total_cmp(&dj)
    })?;
    let line = sub(points[i1], points[i0]);
    let i2 = (0..points.len()).max_by(|&i, &j| {
        let ci = cross(line, sub(points[i], points[i0]));
        let cj = cross(line, sub(points[j], points[i0]));
        dot(ci, ci).total_cmp(&dot(cj, cj))
    })?;
    let base = Facet::new(points, [i0, i1, i2])?;
    let i3 = (0..points.len()).max_by(|&i, &j| base.height(points[i]).abs().total_cmp(&base.height(points[j]).abs()))?;
    if base.height(points[i3]).abs() <= eps {
        return None;
    }
    let inside = {
        let s = [i0, i1, i2, i3].iter().fold([0.0; 3], |acc, &i| {
            [acc[0] + points[i][0], acc[1] + points[i][1], acc[2] + points[i][2]]
        });
        [s[0] / 4.0, s[1] / 4.0, s[2] / 4.0]
    };
    let oriented = |v: [usize; 3]| -> Option<Facet> {
        let f = Facet::new(points, v)?;
        if f.height(inside) > 0.0 {
            Facet::new(points, [v[0], v[2], v[1]])
        } else {
            Some(f)
        }
    };
    let mut facets: Vec<Facet> = [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]]
        .into_iter()
        .map(oriented)
        .collect::<Option<_>>()?;
    let seeds = [i0, i1, i2, i3];
    for (p, &q) in points.iter().enumerate() {
        if seeds.contains(&p) {
            continue;
        }
        let visible: Vec<bool> = facets.iter().map(|f| f.height(q) > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges = HashSet::new();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                edges.insert((f.v[k], f.v[(k + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| !edges.contains(&(b, a))).collect();
        let mut kept: Vec<Facet> = facets
            .into_iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| f)
            .collect();
        for (a, b) in horizon {
            if let Some(f) = Facet::new(points, [a, b, p]) {
                kept.push(f);
            }
        }
        facets = kept;
    }
    Some(facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_with_interior_point() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push([0.5, 0.5, 0.5]);
        let hull = convex_hull(&pts, 1e-12).unwrap();
        assert_eq!(hull.len(), 12);
        let used: HashSet<usize> = hull.iter().flat_map(|f| f.v).collect();
        assert!(!used.contains(&8));
        for f in &hull {
            for p in &pts {
                assert!(f.height(*p) <= 1e-12);
            }
        }
    }

    #[test]
    fn coplanar_input() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(convex_hull(&pts, 1e-12).is_none());
    }
}
