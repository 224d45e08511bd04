//! Rotational minimal hypersurfaces (n-catenoids) of H^n x R.
//!
//! The generating curve is `t -> (f(a, t), t)` where `f` is the hyperbolic
//! distance from the vertical axis through the origin. It solves
//! `f_tt = (n-1)(1 + f_t^2) coth f` with `f(0) = a`, `f_t(0) = 0`, and is the
//! inverse of
//!
//! `lambda(a, rho) = sinh^{n-1}(a) int_a^rho (sinh^{2n-2}u - sinh^{2n-2}a)^{-1/2} du`
//!
//! on `[0, T(a))`, `T(a) = lambda(a, inf)`. In ball coordinates the profile
//! sits at Euclidean radius `tanh(f / 2)`.

use crate::error::{domain, Error, Result};
use crate::hyperbolic::BallPoint;
use crate::mesh::Mesh;
use crate::ode::{DormandPrince, Tolerances};
use crate::quadrature::{
    integrate_adaptive, integrate_improper_sqrt_singular_offset, integrate_sqrt_singular_offset, tail_cutoff,
    QuadratureSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_SLOPE_CAP: f64 = 1e3;
/// Fraction of the blow-up parameter covered by default meshes.
pub const DEFAULT_MESH_FRACTION: f64 = 0.9;
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenoidParams {
    pub n: usize,
    pub a: f64,
}

impl CatenoidParams {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("dimension n must be >= 2, got {n}"));
        }
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("neck parameter a must be positive, got {a}"));
        }
        Ok(CatenoidParams { n, a })
    }

    /// `n = 2` lies outside the range of the original construction; the
    /// formulas are evaluated as they stand.
    pub fn is_extension(&self) -> bool {
        self.n == 2
    }

    /// The height bound `pi / (n - 1)` approached by `h_R` as `a` grows.
    pub fn height_limit(&self) -> f64 {
        PI / (self.n as f64 - 1.0)
    }

    fn exponent(&self) -> f64 {
        2.0 * self.n as f64 - 2.0
    }

    /// `sinh^{n-1}(a) (sinh^{2n-2}(a + delta) - sinh^{2n-2}a)^{-1/2}`,
    /// evaluated as `(R^m - 1)^{-1/2}` with `R = sinh(a + delta) / sinh a`
    /// and `R - 1 = 2 sinh^2(delta / 2) + coth(a) sinh(delta)`.
    pub fn kernel(&self, delta: f64) -> f64 {
        let h = (0.5 * delta).sinh();
        let r1 = 2.0 * h * h + delta.sinh() / self.a.tanh();
        let gap = (self.exponent() * r1.ln_1p()).exp_m1();
        1.0 / gap.sqrt()
    }

    fn decay_rate(&self) -> f64 {
        self.n as f64 - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSource {
    Ode,
    QuadratureInversion,
}

/// Sampled generating curve on `[0, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub samples: Vec<(f64, f64)>,
    pub blow_up: f64,
    pub params: CatenoidParams,
    pub source: ProfileSource,
}

/// A catenoid with its blow-up parameter computed once.
#[derive(Debug, Clone)]
pub struct Catenoid {
    params: CatenoidParams,
    spec: QuadratureSpec,
    blow_up: f64,
    cutoff: f64,
}

impl Catenoid {
    pub fn new(params: CatenoidParams, spec: &QuadratureSpec) -> Result<Self> {
        let params = CatenoidParams::new(params.n, params.a)?;
        let kernel = |d: f64| params.kernel(d);
        let blow_up = integrate_improper_sqrt_singular_offset(kernel, params.decay_rate(), spec)?.value;
        let cutoff = tail_cutoff(&kernel, params.decay_rate(), 0.25 * spec.tol)?;
        Ok(Catenoid {
            params,
            spec: *spec,
            blow_up,
            cutoff,
        })
    }

    pub fn params(&self) -> CatenoidParams {
        self.params
    }

    /// `T(a)`.
    pub fn blow_up(&self) -> f64 {
        self.blow_up
    }

    /// Vertical height `h_R = 2 T(a)`.
    pub fn height(&self) -> f64 {
        2.0 * self.blow_up
    }

    pub fn lambda(&self, rho: f64) -> Result<f64> {
        let a = self.params.a;
        if !(rho >= a) {
            return domain(format!("lambda needs rho >= a = {a}, got {rho}"));
        }
        if rho == a {
            return Ok(0.0);
        }
        if rho == f64::INFINITY {
            return Ok(self.blow_up);
        }
        let len = (rho - a).min(self.cutoff);
        let spec = QuadratureSpec {
            tol: 0.75 * self.spec.tol,
            ..self.spec
        };
        Ok(integrate_sqrt_singular_offset(|d| self.params.kernel(d), len, &spec)?.value)
    }

    /// `d lambda / ds` at `rho = a + s^2`; smooth, with value
    /// `2 / sqrt((2n - 2) coth a)` at `s = 0`.
    fn lambda_slope(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 2.0 / (self.params.exponent() / self.params.a.tanh()).sqrt();
        }
        2.0 * s * self.params.kernel(s * s)
    }

    /// `f(a, t)` for `|t| < T(a)`.
    pub fn f(&self, t: f64) -> Result<f64> {
        let target = t.abs();
        if !(target < self.blow_up) {
            return domain(format!(
                "|t| = {target} is not below the blow-up parameter T = {}",
                self.blow_up
            ));
        }
        if target == 0.0 {
            return Ok(self.params.a);
        }
        // Safeguarded Newton in s = sqrt(rho - a), where lambda is smooth.
        // lambda is tracked incrementally from the left end of the bracket.
        let seg = QuadratureSpec {
            tol: self.spec.tol / 64.0,
            ..self.spec
        };
        let (mut lo, mut lam_lo) = (0.0f64, 0.0f64);
        let mut hi = f64::INFINITY;
        let mut cand = target / self.lambda_slope(0.0);
        for _ in 0..200 {
            if !(cand > lo && cand < hi) || !cand.is_finite() {
                cand = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo + 1.0 };
            }
            let lam = lam_lo + integrate_adaptive(|s| self.lambda_slope(s), lo, cand, &seg)?.value;
            let resid = lam - target;
            if resid.abs() <= 1e-14 * target.max(1.0) {
                return Ok(self.params.a + cand * cand);
            }
            let slope = self.lambda_slope(cand);
            if resid < 0.0 {
                lo = cand;
                lam_lo = lam;
            } else {
                hi = cand;
            }
            if hi.is_finite() && hi - lo <= 4.0 * f64::EPSILON * hi.max(1.0) {
                let s = 0.5 * (lo + hi);
                return Ok(self.params.a + s * s);
            }
            let newton = resid / slope;
            if newton.abs() <= 2.0 * f64::EPSILON * cand {
                return Ok(self.params.a + cand * cand);
            }
            cand -= newton;
        }
        Err(Error::Numerical(format!("inversion of lambda did not converge at t = {t}")))
    }

    /// Profile samples `(k step, f)` for `k step < t_end` by quadrature
    /// inversion, computed in parallel.
    pub fn profile_quadrature(&self, step: f64, t_end: f64) -> Result<ProfileCurve> {
        if !(step > 0.0) {
            return domain(format!("step must be positive, got {step}"));
        }
        let t_end = t_end.min(self.blow_up);
        let count = grid_count(step, t_end);
        let samples = (0..count)
            .into_par_iter()
            .map(|k| {
                let t = k as f64 * step;
                self.f(t).map(|f| (t, f))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProfileCurve {
            samples,
            blow_up: self.blow_up,
            params: self.params,
            source: ProfileSource::QuadratureInversion,
        })
    }

    /// Integrates the Cauchy problem on the grid `k step` until the slope
    /// exceeds `slope_cap`.
    pub fn profile_ode(&self, slope_cap: f64, step: f64) -> Result<ProfileCurve> {
        if !(slope_cap > 1.0) {
            return domain(format!("slope cap must exceed 1, got {slope_cap}"));
        }
        if !(step > 0.0) {
            return domain(format!("step must be positive, got {step}"));
        }
        let k = self.params.n as f64 - 1.0;
        let rhs = |y: &[f64; 2]| [y[1], k * (1.0 + y[1] * y[1]) / y[0].tanh()];
        let mut dp = DormandPrince::new(rhs, 0.0, [self.params.a, 0.0], step.min(1e-2), Tolerances::default());
        let mut samples = vec![(0.0, self.params.a)];
        let mut i = 1usize;
        loop {
            let t_next = i as f64 * step;
            let finished = dp.advance_to(t_next, |y| y[1] > slope_cap)?;
            if !finished {
                break;
            }
            if !(t_next < self.blow_up) {
                break;
            }
            samples.push((t_next, dp.y[0]));
            i += 1;
        }
        Ok(ProfileCurve {
            samples,
            blow_up: self.blow_up,
            params: self.params,
            source: ProfileSource::Ode,
        })
    }
}

fn grid_count(step: f64, t_end: f64) -> usize {
    let mut count = (t_end / step).ceil() as usize;
    while count > 0 && (count - 1) as f64 * step >= t_end {
        count -= 1;
    }
    count.max(1)
}

/// `(T(a), h_R(a))`.
#[allow(non_snake_case)]
pub fn cat_T(params: CatenoidParams, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let c = Catenoid::new(params, spec)?;
    Ok((c.blow_up(), c.height()))
}

pub fn cat_lambda(params: CatenoidParams, rho: f64, spec: &QuadratureSpec) -> Result<f64> {
    Catenoid::new(params, spec)?.lambda(rho)
}

pub fn cat_f(params: CatenoidParams, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Catenoid::new(params, spec)?.f(t)
}

pub fn cat_profile_ode(
    params: CatenoidParams,
    slope_cap: f64,
    step: f64,
    spec: &QuadratureSpec,
) -> Result<ProfileCurve> {
    Catenoid::new(params, spec)?.profile_ode(slope_cap, step)
}

/// The positive height at which the profiles of `C_a` and `C_b` cross.
pub fn cat_intersection(a: f64, b: f64, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    let ca = Catenoid::new(CatenoidParams::new(n, a)?, spec)?;
    let cb = Catenoid::new(CatenoidParams::new(n, b)?, spec)?;
    if a == b {
        return Err(Error::DegenerateInput(format!("identical neck parameters a = b = {a}")));
    }
    let t_min = ca.blow_up().min(cb.blow_up());
    let g = |t: f64| -> Result<f64> { Ok(ca.f(t)? - cb.f(t)?) };
    let g0 = a - b;
    let mut probes: Vec<f64> = (1..32).map(|k| t_min * k as f64 / 32.0).collect();
    probes.extend((6..=40).map(|j| t_min * (1.0 - 0.5f64.powi(j))));
    let mut signs = Vec::new();
    let mut lo = 0.0;
    let mut bracket = None;
    for &t in &probes {
        let v = match g(t) {
            Ok(v) => v,
            Err(_) => break,
        };
        signs.push((t, v.signum()));
        if v == 0.0 {
            return Ok(t);
        }
        if v.signum() != g0.signum() {
            bracket = Some((lo, t));
            break;
        }
        lo = t;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        let data: Vec<String> = signs.iter().map(|(t, s)| format!("{t:.6}:{s:+}")).collect();
        Error::Numerical(format!(
            "no sign change of f({a}, t) - f({b}, t) on (0, {t_min}); samples {}",
            data.join(" ")
        ))
    })?;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let v = g(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == g0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mesh of the catenoid over `|t| <= 0.9 T`.
pub fn cat_mesh(params: CatenoidParams, res_t: usize, res_angle: usize, spec: &QuadratureSpec) -> Result<Mesh> {
    let c = Catenoid::new(params, spec)?;
    cat_mesh_piece(&c, DEFAULT_MESH_FRACTION * c.blow_up(), res_t, res_angle)
}

/// Mesh of the compact piece `|t| <= t_max` with `2 res_t + 1` rings.
///
/// For `n = 2` each ring is a circle; for `n = 3` each level is a UV sphere
/// with `res_angle` meridians; for `n >= 4` the mesh is the slice by the
/// plane of the first two coordinates.
pub fn cat_mesh_piece(c: &Catenoid, t_max: f64, res_t: usize, res_angle: usize) -> Result<Mesh> {
    if res_t < 4 {
        return domain(format!("res_t must be >= 4, got {res_t}"));
    }
    if res_angle < 8 {
        return domain(format!("res_angle must be >= 8, got {res_angle}"));
    }
    if !(t_max > 0.0 && t_max < c.blow_up()) {
        return domain(format!("t_max must lie in (0, T = {}), got {t_max}", c.blow_up()));
    }
    let n = c.params().n;
    let radii = (0..=res_t)
        .into_par_iter()
        .map(|i| c.f(t_max * i as f64 / res_t as f64).map(|f| (0.5 * f).tanh()))
        .collect::<Result<Vec<f64>>>()?;
    // Levels from -t_max to t_max reuse the radius of |t|.
    let levels: Vec<(f64, f64)> = (0..=2 * res_t)
        .map(|j| {
            let i = j as isize - res_t as isize;
            let t = t_max * i as f64 / res_t as f64;
            (t, radii[i.unsigned_abs()])
        })
        .collect();
    let label = format!("catenoid n={} a={}", n, c.params().a);
    if n == 3 {
        sphere_levels(&levels, res_angle, label)
    } else {
        ring_levels(&levels, res_angle, n, label)
    }
}

fn ring_levels(levels: &[(f64, f64)], res_angle: usize, n: usize, label: String) -> Result<Mesh> {
    let mut vertices = Vec::with_capacity(levels.len() * res_angle);
    for &(t, r) in levels {
        for j in 0..res_angle {
            let th = 2.0 * PI * j as f64 / res_angle as f64;
            let mut x = vec![0.0; n];
            x[0] = r * th.cos();
            x[1] = r * th.sin();
            vertices.push(BallPoint::new(x, t)?);
        }
    }
    let mut faces = Vec::new();
    for l in 0..levels.len() - 1 {
        for j in 0..res_angle {
            let jn = (j + 1) % res_angle;
            let (p, q) = (l * res_angle + j, l * res_angle + jn);
            let (r, s) = (p + res_angle, q + res_angle);
            faces.push([p, q, s]);
            faces.push([p, s, r]);
        }
    }
    Mesh::new(vertices, faces, label)
}

fn sphere_levels(levels: &[(f64, f64)], res_angle: usize, label: String) -> Result<Mesh> {
    let lat = res_angle / 2;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for &(t, r) in levels {
        let base = vertices.len();
        vertices.push(BallPoint::new(vec![0.0, 0.0, r], t)?);
        for k in 1..lat {
            let phi = PI * k as f64 / lat as f64;
            for j in 0..res_angle {
                let th = 2.0 * PI * j as f64 / res_angle as f64;
                let x = vec![r * phi.sin() * th.cos(), r * phi.sin() * th.sin(), r * phi.cos()];
                vertices.push(BallPoint::new(x, t)?);
            }
        }
        let south = vertices.len();
        vertices.push(BallPoint::new(vec![0.0, 0.0, -r], t)?);
        let ring = |k: usize, j: usize| base + 1 + (k - 1) * res_angle + (j % res_angle);
        for j in 0..res_angle {
            faces.push([base, ring(1, j), ring(1, j + 1)]);
            faces.push([south, ring(lat - 1, j + 1), ring(lat - 1, j)]);
        }
        for k in 1..lat - 1 {
            for j in 0..res_angle {
                faces.push([ring(k, j), ring(k + 1, j), ring(k + 1, j + 1)]);
                faces.push([ring(k, j), ring(k + 1, j + 1), ring(k, j + 1)]);
            }
        }
    }
    Mesh::new(vertices, faces, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn params_validation() {
        assert!(CatenoidParams::new(1, 1.0).is_err());
        assert!(CatenoidParams::new(3, 0.0).is_err());
        assert!(CatenoidParams::new(2, 1.0).unwrap().is_extension());
    }

    #[test]
    fn kernel_matches_direct_formula_away_from_the_singularity() {
        let p = CatenoidParams::new(3, 0.7).unwrap();
        for d in [0.01, 0.3, 2.0] {
            let u: f64 = 0.7 + d;
            let direct = 0.7f64.sinh().powi(2) / (u.sinh().powi(4) - 0.7f64.sinh().powi(4)).sqrt();
            assert!((p.kernel(d) - direct).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn lambda_endpoints() {
        let c = Catenoid::new(CatenoidParams::new(3, 1.0).unwrap(), &spec()).unwrap();
        assert_eq!(c.lambda(1.0).unwrap(), 0.0);
        assert!((c.lambda(1e6).unwrap() - c.blow_up()).abs() < 1e-8);
        assert!(c.lambda(0.5).is_err());
    }

    #[test]
    fn f_basics() {
        let c = Catenoid::new(CatenoidParams::new(3, 1.0).unwrap(), &spec()).unwrap();
        assert_eq!(c.f(0.0).unwrap(), 1.0);
        assert!(c.f(c.blow_up()).is_err());
        assert!(c.f(-c.blow_up() * 1.01).is_err());
        let t = 0.6 * c.blow_up();
        let f = c.f(t).unwrap();
        assert!((c.lambda(f).unwrap() - t).abs() < 1e-9);
        assert_eq!(f, c.f(-t).unwrap());
    }

    #[test]
    fn ode_profile_starts_at_neck_and_stays_above_it() {
        let c = Catenoid::new(CatenoidParams::new(3, 1.0).unwrap(), &spec()).unwrap();
        let p = c.profile_ode(DEFAULT_SLOPE_CAP, 0.01).unwrap();
        assert_eq!(p.samples[0], (0.0, 1.0));
        assert!(p.samples.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
        assert!(p.samples.last().unwrap().0 < c.blow_up());
        assert!(matches!(c.profile_ode(1.0, 0.01), Err(Error::Domain(_))));
    }

    #[test]
    fn intersection_is_symmetric_and_degenerate_input_rejected() {
        let s = spec();
        let t1 = cat_intersection(0.5, 1.0, 3, &s).unwrap();
        let t2 = cat_intersection(1.0, 0.5, 3, &s).unwrap();
        assert!((t1 - t2).abs() < 1e-11);
        assert!(matches!(cat_intersection(0.5, 0.5, 3, &s), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn mesh_rings_and_symmetry() {
        let p = CatenoidParams::new(2, 1.0).unwrap();
        let m = cat_mesh(p, 4, 8, &spec()).unwrap();
        let neck = (0.5f64).tanh();
        let mid: Vec<&BallPoint> = m.vertices().iter().filter(|v| v.t() == 0.0).collect();
        assert_eq!(mid.len(), 8);
        for v in mid {
            let r = v.x().iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((r - neck).abs() < 1e-15);
        }
        assert!(cat_mesh(p, 3, 8, &spec()).is_err());
        assert!(cat_mesh(p, 4, 7, &spec()).is_err());
        let m3 = cat_mesh(CatenoidParams::new(3, 1.0).unwrap(), 4, 8, &spec()).unwrap();
        assert_eq!(m3.vertices().len(), 9 * (2 + 3 * 8));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn f_is_even_and_increasing(frac in 0.01f64..0.95, n in 2usize..5) {
            let c = Catenoid::new(CatenoidParams::new(n, 0.8).unwrap(), &spec()).unwrap();
            let t = frac * c.blow_up();
            let f = c.f(t).unwrap();
            prop_assert_eq!(f, c.f(-t).unwrap());
            prop_assert!(f > 0.8);
            prop_assert!(c.f(t * 0.99).unwrap() < f);
        }
    }
}
