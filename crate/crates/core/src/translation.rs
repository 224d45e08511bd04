//! The translation-invariant minimal hypersurfaces `M_d`, `d > 1`.
//!
//! For `n = 2`, `M_d` is the union of two vertical graphs over the exterior
//! of the equidistant curve at distance `arcosh d` from a geodesic `γ`,
//! meeting the slice `t = 0` along that curve. The upper graph over a point
//! at distance `ρ` from `γ` has height
//!
//! `h(ρ) = int_{arcosh d}^ρ d (cosh^2 u - d^2)^{-1/2} du`,
//!
//! and `H(d) = h(inf)`. For `n >= 3` the total height is `S(d)` with
//! `cosh^{n-1}(a) = d`, and the graph profile is the partial integral of the
//! same integrand up to `t = cosh ρ / cosh a`. That profile is a
//! reconstruction: only its total is a known quantity.

use crate::boundary::AsymptoticCurve;
use crate::error::{domain, Error, Result};
use crate::hyperbolic::{equidistant_offset, BallPoint, Geodesic, IdealPoint, Side};
use crate::mesh::Mesh;
use crate::quadrature::{
    integrate_improper_sqrt_singular_offset, integrate_sqrt_singular_offset, tail_cutoff, QuadratureSpec,
};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Vertices per arc of the sampled asymptotic boundary.
pub const ARC_SAMPLES: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationParams {
    pub n: usize,
    pub d: f64,
    pub base: Geodesic,
}

impl TranslationParams {
    pub fn new(n: usize, d: f64, base: Geodesic) -> Result<Self> {
        check_d(d)?;
        if n < 2 {
            return domain(format!("dimension n must be >= 2, got {n}"));
        }
        if base.dim() != n {
            return domain(format!("geodesic lives in H^{} but n = {n}", base.dim()));
        }
        Ok(TranslationParams { n, d, base })
    }
}

fn check_d(d: f64) -> Result<()> {
    if !(d > 1.0) || !d.is_finite() {
        return domain(format!("d must be a finite number > 1, got {d}"));
    }
    Ok(())
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// An integral `int_0^len psi` with an inverse-square-root singularity at 0
/// and an exponential tail.
struct SingularProfile<F> {
    psi: F,
    rate: f64,
    total: f64,
    cutoff: f64,
    spec: QuadratureSpec,
}

impl<F: Fn(f64) -> f64> SingularProfile<F> {
    fn new(psi: F, rate: f64, spec: &QuadratureSpec) -> Result<Self> {
        let total = integrate_improper_sqrt_singular_offset(&psi, rate, spec)?.value;
        let cutoff = tail_cutoff(&psi, rate, 0.25 * spec.tol)?;
        Ok(SingularProfile {
            psi,
            rate,
            total,
            cutoff,
            spec: *spec,
        })
    }

    fn partial(&self, len: f64) -> Result<f64> {
        if len == 0.0 {
            return Ok(0.0);
        }
        if len == f64::INFINITY {
            return Ok(self.total);
        }
        let spec = QuadratureSpec {
            tol: 0.75 * self.spec.tol,
            ..self.spec
        };
        debug_assert!(self.rate > 0.0);
        Ok(integrate_sqrt_singular_offset(&self.psi, len.min(self.cutoff), &spec)?.value)
    }
}

/// Integrand of `H` at `u = arcosh(d) + delta`, with
/// `cosh u - d = 2 d sinh^2(delta / 2) + sqrt(d^2 - 1) sinh(delta)`.
fn h_kernel(d: f64) -> impl Fn(f64) -> f64 + Sync {
    let root = ((d - 1.0) * (d + 1.0)).sqrt();
    let u0 = d.acosh();
    move |delta: f64| {
        let h = (0.5 * delta).sinh();
        let minus = 2.0 * d * h * h + root * delta.sinh();
        let plus = (u0 + delta).cosh() + d;
        d / (minus * plus).sqrt()
    }
}

/// Integrand of `S` after `t = e^v`:
/// `cosh(a) e^v / sqrt((e^{(2n-2)v} - 1)(cosh^2(a) e^{2v} - 1))`.
fn s_kernel(d: f64, n: usize) -> impl Fn(f64) -> f64 + Sync {
    let k = n as f64 - 1.0;
    let lc = d.ln() / k;
    // cosh^2(a) = d^{2/(n-1)}, and cosh^2(a) e^{2v} - 1 = expm1(2 (lc + v)).
    move |v: f64| {
        let a = (2.0 * k * v).exp_m1();
        let b = (2.0 * (lc + v)).exp_m1();
        (lc + v).exp() / (a * b).sqrt()
    }
}

fn neck(d: f64, n: usize) -> f64 {
    d.powf(1.0 / (n as f64 - 1.0)).acosh()
}

#[allow(non_snake_case)]
pub fn md_H(d: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_d(d)?;
    let est = integrate_improper_sqrt_singular_offset(h_kernel(d), 1.0, spec)?;
    Ok(est.value)
}

#[allow(non_snake_case)]
pub fn md_S(d: f64, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_d(d)?;
    if n < 3 {
        return domain(format!("S(d) is defined for n >= 3, got n = {n}"));
    }
    let est = integrate_improper_sqrt_singular_offset(s_kernel(d, n), n as f64 - 1.0, spec)?;
    Ok(est.value)
}

/// Heights of the upper graph of `M_d` as a function of the distance to `γ`.
pub struct HeightProfile {
    n: usize,
    d: f64,
    lower: f64,
    inner: Box<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    total: f64,
}

impl HeightProfile {
    pub fn new(d: f64, n: usize, spec: &QuadratureSpec) -> Result<Self> {
        check_d(d)?;
        if n < 2 {
            return domain(format!("dimension n must be >= 2, got {n}"));
        }
        if n == 2 {
            let lower = d.acosh();
            let prof = SingularProfile::new(h_kernel(d), 1.0, spec)?;
            let total = prof.total;
            Ok(HeightProfile {
                n,
                d,
                lower,
                inner: Box::new(move |rho| prof.partial(rho - lower)),
                total,
            })
        } else {
            let a = neck(d, n);
            let lca = ln_cosh(a);
            let prof = SingularProfile::new(s_kernel(d, n), n as f64 - 1.0, spec)?;
            let total = prof.total;
            Ok(HeightProfile {
                n,
                d,
                lower: a,
                inner: Box::new(move |rho| {
                    let v = if rho == f64::INFINITY { rho } else { (ln_cosh(rho) - lca).max(0.0) };
                    prof.partial(v)
                }),
                total,
            })
        }
    }

    /// Smallest admissible distance: `arcosh d` for `n = 2`, `a` otherwise.
    pub fn lower_limit(&self) -> f64 {
        self.lower
    }

    /// `H(d)` or `S(d)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn height(&self, rho: f64) -> Result<f64> {
        if !(rho >= self.lower) {
            return domain(format!("rho = {rho} is below the lower limit {}", self.lower));
        }
        if rho == self.lower {
            return Ok(0.0);
        }
        (self.inner)(rho)
    }
}

pub fn md_profile_height(d: f64, rho: f64, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    HeightProfile::new(d, n, spec)?.height(rho)
}

/// Mesh of `M_d` for `n = 2` over `u` in `[-extent, extent]` along `γ` and
/// distances `arcosh d + extent (i / res)^2`, together with the sampled
/// asymptotic boundary `L_d ∪ α_d ∪ R_d ∪ α_{-d}`.
///
/// The mesh lies on the positive side of `γ` (the side of its normal).
pub fn md_mesh(
    params: &TranslationParams,
    extent: f64,
    res: usize,
    spec: &QuadratureSpec,
) -> Result<(Mesh, AsymptoticCurve)> {
    if params.n != 2 {
        return Err(Error::UnsupportedDimension(params.n));
    }
    if !(extent > 0.0) || !extent.is_finite() {
        return domain(format!("extent must be positive, got {extent}"));
    }
    if res < 2 {
        return domain(format!("resolution must be >= 2, got {res}"));
    }
    let prof = HeightProfile::new(params.d, 2, spec)?;
    let rho0 = prof.lower_limit();
    let rhos: Vec<f64> = (0..=res)
        .map(|i| rho0 + extent * (i as f64 / res as f64).powi(2))
        .collect();
    let heights = rhos
        .par_iter()
        .map(|&r| prof.height(r))
        .collect::<Result<Vec<f64>>>()?;
    let cols = 2 * res + 1;
    let us: Vec<f64> = (0..cols)
        .map(|j| -extent + 2.0 * extent * j as f64 / (cols - 1) as f64)
        .collect();
    let g = &params.base;
    let grid = rhos
        .iter()
        .map(|&r| {
            us.iter()
                .map(|&u| equidistant_offset(g, r, Side::Positive, u))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    // Row 0 is the seam at t = 0, shared by both graphs.
    let mut vertices = Vec::with_capacity(cols * (2 * res + 1));
    let mut upper = vec![vec![0usize; cols]; res + 1];
    let mut lower = vec![vec![0usize; cols]; res + 1];
    for (i, row) in grid.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            upper[i][j] = vertices.len();
            vertices.push(BallPoint::new(x.clone(), heights[i])?);
            if i == 0 {
                lower[i][j] = upper[i][j];
            } else {
                lower[i][j] = vertices.len();
                vertices.push(BallPoint::new(x.clone(), -heights[i])?);
            }
        }
    }
    let mut faces = Vec::new();
    for idx in [&upper, &lower] {
        for i in 0..res {
            for j in 0..cols - 1 {
                let (p, q, r, s) = (idx[i][j], idx[i][j + 1], idx[i + 1][j], idx[i + 1][j + 1]);
                faces.push([p, q, s]);
                faces.push([p, s, r]);
            }
        }
    }
    let mesh = Mesh::new(vertices, faces, format!("md n=2 d={}", params.d))?;
    let curve = md_asymptotic_boundary(params, prof.total())?;
    Ok((mesh, curve))
}

/// `{p} x [-H, H]`, the arc of `∂∞H^2` on the positive side of `γ` at
/// height `H`, `{q} x [-H, H]` and the same arc at height `-H`.
fn md_asymptotic_boundary(params: &TranslationParams, h: f64) -> Result<AsymptoticCurve> {
    let g = &params.base;
    let (p, q) = (g.start().u(), g.end().u());
    let tp = p[1].atan2(p[0]);
    let mut tq = q[1].atan2(q[0]);
    let far = equidistant_offset(g, 40.0, Side::Positive, 0.0)?;
    let tm = far[1].atan2(far[0]);
    // Choose the winding from p to q that passes through the positive side.
    let wrap = |x: f64| x.rem_euclid(2.0 * PI);
    if wrap(tm - tp) > wrap(tq - tp) {
        tq = tp - wrap(tp - tq);
    } else {
        tq = tp + wrap(tq - tp);
    }
    let k = ARC_SAMPLES;
    let mut v = Vec::with_capacity(4 * k);
    for i in 0..k {
        v.push(IdealPoint::from_angle(tp, Some(-h + 2.0 * h * i as f64 / k as f64)));
    }
    for i in 0..k {
        v.push(IdealPoint::from_angle(tp + (tq - tp) * i as f64 / k as f64, Some(h)));
    }
    for i in 0..k {
        v.push(IdealPoint::from_angle(tq, Some(h - 2.0 * h * i as f64 / k as f64)));
    }
    for i in 0..k {
        v.push(IdealPoint::from_angle(tq + (tp - tq) * i as f64 / k as f64, Some(-h)));
    }
    AsymptoticCurve::new(v, true)
}
