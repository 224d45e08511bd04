//! Small dense-vector helpers on `f64` slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn scaled(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|x| x * k).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Returns `a / |a|`, or `None` for a (numerically) zero vector.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n <= f64::MIN_POSITIVE || !n.is_finite() {
        None
    } else {
        Some(scaled(a, 1.0 / n))
    }
}

/// Unit vector orthogonal to the unit vector `w`, chosen deterministically.
///
/// In the plane this is the counter-clockwise quarter turn of `w`; in higher
/// dimension the coordinate axis least aligned with `w` is orthogonalized.
pub fn orthogonal_unit(w: &[f64]) -> Vec<f64> {
    if w.len() == 2 {
        return vec![-w[1], w[0]];
    }
    let k = (0..w.len())
        .min_by(|&i, &j| w[i].abs().total_cmp(&w[j].abs()))
        .unwrap_or(0);
    let mut e = vec![0.0; w.len()];
    e[k] = 1.0;
    let c = dot(&e, w);
    let v: Vec<f64> = e.iter().zip(w).map(|(ei, wi)| ei - c * wi).collect();
    normalized(&v).expect("coordinate axis cannot be parallel to a unit vector in dimension >= 3")
}
