//! Self-verification: the acceptance checks, their reference oracles and
//! the JSON report.

use crate::barriers::{geodesic_sphere_mesh, reflect_residual, sweep_contact, sweep_with, SweepStatus};
use crate::boundary::AsymptoticCurve;
use crate::catenoid::{cat_intersection, cat_mesh, Catenoid, CatenoidParams, DEFAULT_SLOPE_CAP};
use crate::error::Result;
use crate::hyperbolic::{BallPoint, Geodesic, IdealPoint, Mirror, Translation, VerticalHyperplane};
use crate::mesh::Mesh;
use crate::obstruction::{check_slab_projection, check_strict_convexity, Rule, Status};
use crate::quadrature::{integrate_improper, integrate_sqrt_singular, QuadratureSpec};
use crate::translation::{md_H, md_S, md_mesh, TranslationParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const CRITERIA: u32 = 10;
pub const HEIGHT_LAW_SECONDS: f64 = 30.0;
pub const ROUND_TRIP_TOL: f64 = 1e-8;
pub const ROUND_TRIP_SECONDS: f64 = 60.0;
pub const TWO_ROUTE_TOL: f64 = 1e-6;
pub const TWO_ROUTE_SECONDS: f64 = 60.0;
pub const INTERSECTION_TOL: f64 = 1e-6;
pub const H2_REFERENCE: f64 = 1.685_750_354_812_596;
pub const H2_TOL: f64 = 1e-8;
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Sweep agreement, in units of the sweep step.
pub const SWEEP_AGREEMENT: f64 = 1e-3;
pub const SWEEP_MAX_VERTICES: usize = 500;
const SWEEP_RANGE: (f64, f64) = (0.0, 3.0);
/// Closed-form quadrature error, in units of the requested tolerance.
pub const QUADRATURE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    /// `|expected - observed| <= tolerance`.
    AbsDiff,
    /// `observed <= expected`.
    AtMost,
    /// `observed < expected`.
    Below,
    /// A property held; `observed` counts violations.
    Holds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub criterion: u32,
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub predicate: Predicate,
    pub pass: bool,
    pub details: String,
}

impl ReportEntry {
    fn new(criterion: u32, name: impl Into<String>, predicate: Predicate, expected: f64, observed: f64, tolerance: f64) -> Self {
        let pass = match predicate {
            Predicate::AbsDiff => (expected - observed).abs() <= tolerance,
            Predicate::AtMost => observed <= expected,
            Predicate::Below => observed < expected,
            Predicate::Holds => observed == 0.0,
        };
        ReportEntry {
            criterion,
            name: name.into(),
            expected,
            observed,
            tolerance,
            predicate,
            pass,
            details: String::new(),
        }
    }

    fn abs_diff(c: u32, name: impl Into<String>, expected: f64, observed: f64, tol: f64) -> Self {
        Self::new(c, name, Predicate::AbsDiff, expected, observed, tol)
    }

    fn at_most(c: u32, name: impl Into<String>, limit: f64, observed: f64) -> Self {
        Self::new(c, name, Predicate::AtMost, limit, observed, 0.0)
    }

    fn below(c: u32, name: impl Into<String>, limit: f64, observed: f64) -> Self {
        Self::new(c, name, Predicate::Below, limit, observed, 0.0)
    }

    fn holds(c: u32, name: impl Into<String>, violations: usize) -> Self {
        Self::new(c, name, Predicate::Holds, 0.0, violations as f64, 0.0)
    }

    fn with_details(mut self, d: impl Into<String>) -> Self {
        self.details = d.into();
        self
    }

    fn error(c: u32, name: impl Into<String>, e: &crate::Error) -> Self {
        let mut r = Self::new(c, name, Predicate::Holds, 0.0, f64::NAN, 0.0);
        r.pass = false;
        r.details = format!("error: {e}");
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub quadrature_tol: f64,
    pub quick: bool,
    pub seed: u64,
    pub grids: Vec<String>,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    pub summary: Summary,
    pub metadata: Metadata,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn criterion_passes(&self, c: u32) -> bool {
        let mut it = self.entries.iter().filter(|e| e.criterion == c).peekable();
        it.peek().is_some() && it.all(|e| e.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub tol: f64,
    /// Coarser grids and fewer random cases.
    pub quick: bool,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: crate::quadrature::DEFAULT_TOL,
            quick: false,
            seed: 20_240_601,
        }
    }
}

impl VerifyConfig {
    fn spec(&self) -> Result<QuadratureSpec> {
        QuadratureSpec::with_tol(self.tol)
    }

    fn grid_step(&self, full: f64, quick: f64) -> f64 {
        if self.quick {
            quick
        } else {
            full
        }
    }

    fn count(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }

    pub fn grids(&self) -> Vec<String> {
        vec![
            format!("height law: a = 0.1..5.0 step {}", self.grid_step(0.1, 0.5)),
            format!("round trip: {} t-points, a in {{0.1, 1, 3}}, n in {{2, 3, 4}}", self.count(50, 10)),
            format!("two routes: step {}", self.grid_step(0.01, 0.05)),
            format!("intersections: {} random pairs", self.count(20, 5)),
            format!("H(d), 2S(d): d = 1.1..10 step {}", self.grid_step(0.1, 0.5)),
            format!("sweeps: {} random configurations", self.count(10, 3)),
            "quadrature: tol in {1e-6, 1e-8, 1e-10}".to_string(),
        ]
    }
}

/// Grid `lo, lo + step, ..` through `hi`, built from integer multiples.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| lo + k as f64 * step).collect()
}

fn strictly_increasing_violations(v: &[f64]) -> usize {
    v.windows(2).filter(|w| !(w[1] > w[0])).count()
}

fn strictly_decreasing_violations(v: &[f64]) -> usize {
    v.windows(2).filter(|w| !(w[1] < w[0])).count()
}

/// Runs one criterion. Errors inside a check become failing entries.
pub fn criterion(c: u32, cfg: &VerifyConfig) -> Vec<ReportEntry> {
    let run = match c {
        1 => height_law(cfg),
        2 => round_trip(cfg),
        3 => two_routes(cfg),
        4 => intersections(cfg),
        5 => h_limits(cfg),
        6 => s_law(cfg),
        7 => symmetry(cfg),
        8 => sweeps(cfg),
        9 => obstruction_fixtures(),
        10 => quadrature_honesty(),
        _ => return vec![ReportEntry::holds(c, "unknown criterion", 1)],
    };
    match run {
        Ok(v) => v,
        Err(e) => vec![ReportEntry::error(c, format!("criterion {c}"), &e)],
    }
}

pub fn run(cfg: &VerifyConfig) -> Report {
    let entries: Vec<ReportEntry> = (1..=CRITERIA).flat_map(|c| criterion(c, cfg)).collect();
    let passed = entries.iter().filter(|e| e.pass).count();
    let total = entries.len();
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Report {
        entries,
        summary: Summary { passed, total },
        metadata: Metadata {
            quadrature_tol: cfg.tol,
            quick: cfg.quick,
            seed: cfg.seed,
            grids: cfg.grids(),
            timestamp,
        },
    }
}

fn height_law(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let a_grid = grid(0.1, 5.0, cfg.grid_step(0.1, 0.5));
    let mut out = Vec::new();
    for n in [3usize, 4] {
        let start = Instant::now();
        let h: Vec<f64> = a_grid
            .par_iter()
            .map(|&a| Catenoid::new(CatenoidParams::new(n, a)?, &spec).map(|c| c.height()))
            .collect::<Result<_>>()?;
        let elapsed = start.elapsed().as_secs_f64();
        let limit = PI / (n as f64 - 1.0);
        let gaps: Vec<f64> = h.iter().map(|v| limit - v).collect();
        let below = h.iter().filter(|&&v| !(v < limit)).count();
        out.push(
            ReportEntry::holds(1, format!("h_R increasing, n={n}"), strictly_increasing_violations(&h))
                .with_details(format!("h_R(0.1) = {:.12}, h_R(5) = {:.12}", h[0], h[h.len() - 1])),
        );
        out.push(ReportEntry::holds(1, format!("h_R < pi/(n-1), n={n}"), below));
        out.push(
            ReportEntry::holds(1, format!("gap to pi/(n-1) decreasing, n={n}"), strictly_decreasing_violations(&gaps))
                .with_details(format!("gap at a = 5: {:.6e}", gaps[gaps.len() - 1])),
        );
        out.push(ReportEntry::below(1, format!("runtime seconds, n={n}"), HEIGHT_LAW_SECONDS, elapsed));
    }
    Ok(out)
}

fn round_trip(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let points = cfg.count(50, 10);
    let start = Instant::now();
    let combos: Vec<(f64, usize)> = [0.1, 1.0, 3.0]
        .iter()
        .flat_map(|&a| [2usize, 3, 4].map(move |n| (a, n)))
        .collect();
    let worst: Vec<(f64, usize, f64)> = combos
        .par_iter()
        .map(|&(a, n)| {
            let c = Catenoid::new(CatenoidParams::new(n, a)?, &spec)?;
            let tb = c.blow_up();
            let mut worst: f64 = 0.0;
            for i in 0..points {
                let t = tb * (-0.98 + 1.96 * i as f64 / (points - 1) as f64);
                let back = c.lambda(c.f(t)?)?;
                worst = worst.max((back - t.abs()).abs());
            }
            Ok((a, n, worst))
        })
        .collect::<Result<_>>()?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut out: Vec<ReportEntry> = worst
        .into_iter()
        .map(|(a, n, w)| ReportEntry::abs_diff(2, format!("lambda(f(t)) = |t|, a={a}, n={n}"), 0.0, w, ROUND_TRIP_TOL))
        .collect();
    out.push(ReportEntry::below(2, "runtime seconds", ROUND_TRIP_SECONDS, elapsed));
    Ok(out)
}

fn two_routes(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let step = cfg.grid_step(0.01, 0.05);
    let start = Instant::now();
    let mut out = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        let c = Catenoid::new(CatenoidParams::new(3, a)?, &spec)?;
        let t_end = 0.9 * c.blow_up();
        let quad = c.profile_quadrature(step, t_end + 0.5 * step)?;
        let ode = c.profile_ode(DEFAULT_SLOPE_CAP, step)?;
        let mut worst: f64 = 0.0;
        let mut compared = 0usize;
        for (q, o) in quad.samples.iter().zip(&ode.samples) {
            if q.0 > t_end + 1e-12 {
                break;
            }
            worst = worst.max((q.1 - o.1).abs());
            compared += 1;
        }
        let covered = compared as f64 * step >= t_end;
        out.push(
            ReportEntry::abs_diff(3, format!("ODE vs inversion, a={a}, n=3"), 0.0, if covered { worst } else { f64::NAN }, TWO_ROUTE_TOL)
                .with_details(format!("{compared} grid points up to 0.9T = {t_end:.12}")),
        );
    }
    out.push(ReportEntry::below(3, "runtime seconds", TWO_ROUTE_SECONDS, start.elapsed().as_secs_f64()));
    Ok(out)
}

/// Reference profile by fixed-step RK4 on `t_k = k h`; `+inf` once the slope
/// passes `slope_stop`.
pub fn rk4_profile(n: usize, a: f64, h: f64, steps: usize, slope_stop: f64) -> Vec<f64> {
    let k = n as f64 - 1.0;
    let rhs = |y: [f64; 2]| [y[1], k * (1.0 + y[1] * y[1]) / y[0].tanh()];
    let mut y = [a, 0.0];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(a);
    let mut blown = false;
    for _ in 0..steps {
        if blown {
            out.push(f64::INFINITY);
            continue;
        }
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        ];
        blown = !y[1].is_finite() || y[1] > slope_stop;
        out.push(if blown { f64::INFINITY } else { y[0] });
    }
    out
}

/// Sign changes of `f(a,.) - f(b,.)` on a uniform grid of `(0, t_end]`,
/// each located by linear interpolation in its cell.
pub fn dense_intersections(n: usize, a: f64, b: f64, t_end: f64, samples: usize) -> Vec<f64> {
    let h = t_end / samples as f64;
    let fa = rk4_profile(n, a, h, samples, 1e6);
    let fb = rk4_profile(n, b, h, samples, 1e6);
    let g: Vec<f64> = fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| match (x.is_finite(), y.is_finite()) {
            (true, true) => x - y,
            (false, true) => 1.0,
            (true, false) => -1.0,
            (false, false) => f64::NAN,
        })
        .collect();
    let mut roots = Vec::new();
    for k in 1..g.len() {
        let (g0, g1) = (g[k - 1], g[k]);
        if g0.is_nan() || g1.is_nan() {
            break;
        }
        if g0 * g1 < 0.0 || g1 == 0.0 {
            let (t0, t1) = ((k - 1) as f64 * h, k as f64 * h);
            if fa[k].is_finite() && fb[k].is_finite() {
                roots.push(t0 - g0 * (t1 - t0) / (g1 - g0));
            } else {
                roots.push(0.5 * (t0 + t1));
            }
        }
    }
    roots
}

fn intersections(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::new();
    while pairs.len() < cfg.count(20, 5) {
        let a: f64 = rng.gen_range(0.2..3.0);
        let b: f64 = rng.gen_range(0.2..3.0);
        if (a - b).abs() >= 0.05 {
            pairs.push((a, b));
        }
    }
    let results: Vec<(f64, f64, f64, Vec<f64>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let t_star = cat_intersection(a, b, 3, &spec)?;
            let ta = Catenoid::new(CatenoidParams::new(3, a)?, &spec)?.blow_up();
            let tb = Catenoid::new(CatenoidParams::new(3, b)?, &spec)?.blow_up();
            let roots = dense_intersections(3, a, b, ta.min(tb), 40_000);
            Ok((a, b, t_star, roots))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (a, b, t_star, roots) in results {
        let name = format!("t* for a={a:.6}, b={b:.6}");
        if roots.len() != 1 {
            out.push(
                ReportEntry::holds(4, format!("{name}: one positive root"), roots.len().abs_diff(1))
                    .with_details(format!("oracle found {} sign changes", roots.len())),
            );
            continue;
        }
        out.push(ReportEntry::abs_diff(4, name, roots[0], t_star, INTERSECTION_TOL));
    }
    Ok(out)
}

fn h_limits(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let d_grid = grid(1.1, 10.0, cfg.grid_step(0.1, 0.5));
    let h: Vec<f64> = d_grid.par_iter().map(|&d| md_H(d, &spec)).collect::<Result<_>>()?;
    let g3 = md_H(1e3, &spec)? - FRAC_PI_2;
    let g4 = md_H(1e4, &spec)? - FRAC_PI_2;
    let near: Vec<f64> = (1..=6).map(|k| md_H(1.0 + 10f64.powi(-k), &spec)).collect::<Result<_>>()?;
    // Logarithmic divergence: each decade adds about ln(10)/2.
    let slow = near.windows(2).filter(|w| !(w[1] - w[0] > 0.5)).count();
    Ok(vec![
        ReportEntry::holds(5, "H decreasing on 1.1..10", strictly_decreasing_violations(&h)),
        ReportEntry::holds(5, "gaps H(1e3) - pi/2, H(1e4) - pi/2 positive", usize::from(!(g3 > 0.0)) + usize::from(!(g4 > 0.0)))
            .with_details(format!("gaps {g3:.6e}, {g4:.6e}")),
        ReportEntry::below(5, "H(1e4) - pi/2 < 10 (H(1e3) - pi/2)", 10.0 * g3, g4),
        ReportEntry::holds(5, "H(1 + 10^-k) grows by > 0.5 per decade, k = 1..6", slow).with_details(format!(
            "values {}",
            near.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
        )),
        ReportEntry::abs_diff(5, "H(2) reference", H2_REFERENCE, md_H(2.0, &spec)?, H2_TOL),
    ])
}

fn s_law(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let d_grid = grid(1.1, 10.0, cfg.grid_step(0.1, 0.5));
    let mut out = Vec::new();
    for n in [3usize, 4, 5] {
        let limit = PI / (n as f64 - 1.0);
        let two_s: Vec<f64> = d_grid.par_iter().map(|&d| md_S(d, n, &spec).map(|s| 2.0 * s)).collect::<Result<_>>()?;
        let decades: Vec<f64> = (1..=6)
            .map(|k| md_S(10f64.powi(k), n, &spec).map(|s| 2.0 * s - limit))
            .collect::<Result<_>>()?;
        out.push(ReportEntry::holds(6, format!("2S decreasing, n={n}"), strictly_decreasing_violations(&two_s)));
        out.push(ReportEntry::holds(
            6,
            format!("2S > pi/(n-1), n={n}"),
            two_s.iter().filter(|&&v| !(v > limit)).count() + decades.iter().filter(|&&e| !(e > 0.0)).count(),
        ));
        out.push(
            ReportEntry::holds(6, format!("excess 2S - pi/(n-1) decreasing over d = 10..1e6, n={n}"), strictly_decreasing_violations(&decades))
                .with_details(format!(
                    "excess {}",
                    decades.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
                )),
        );
        out.push(ReportEntry::below(6, format!("excess(1e6) < excess(10)/10, n={n}"), decades[0] / 10.0, decades[5]));
    }
    Ok(out)
}

fn symmetry(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let spec = cfg.spec()?;
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let m = cat_mesh(CatenoidParams::new(n, 1.0)?, cfg.count(24, 8), cfg.count(24, 12), &spec)?;
        let r = reflect_residual(&m, &Mirror::Slice(0.0))?;
        out.push(ReportEntry::at_most(7, format!("catenoid slice residual, n={n}"), SYMMETRY_TOL, r));
    }
    let g = Geodesic::from_angles(0.3, 2.5)?;
    let (m, _) = md_mesh(&TranslationParams::new(2, 2.0, g.clone())?, 2.0, cfg.count(16, 6), &spec)?;
    let r = reflect_residual(&m, &Mirror::Plane(VerticalHyperplane::perpendicular_bisector(&g)))?;
    out.push(ReportEntry::at_most(7, "M_d bisector residual, d=2", SYMMETRY_TOL, r));
    Ok(out)
}

fn flat(p: &BallPoint) -> Vec<f64> {
    let mut c = p.x().to_vec();
    c.push(p.t());
    c
}

fn flat_dist(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len() - 1;
    crate::hyperbolic::dist_unchecked(&p[..n], &q[..n]).hypot(p[n] - q[n])
}

/// Minimum of `f` over a 2-parameter domain: exhaustive search over
/// `coarse`, then repeated 5x5 grids shrinking around the best sample.
fn zoom_min(
    f: impl Fn(f64, f64) -> f64,
    clamp: impl Fn(f64, f64) -> (f64, f64),
    coarse: &[(f64, f64)],
    width: f64,
    skip_above: f64,
) -> f64 {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &(x, y) in coarse {
        let d = f(x, y);
        if d < best.0 {
            best = (d, x, y);
        }
    }
    if best.0 > skip_above {
        return best.0;
    }
    let mut w = width;
    while w > 1e-13 {
        let (_, x0, y0) = best;
        for i in 0..=4 {
            for j in 0..=4 {
                let (x, y) = clamp(x0 + w * (i as f64 - 2.0) / 2.0, y0 + w * (j as f64 - 2.0) / 2.0);
                let d = f(x, y);
                if d < best.0 {
                    best = (d, x, y);
                }
            }
        }
        w *= 0.6;
    }
    best.0
}

const GRID: usize = 8;

fn vertex_face_bf(p: &[f64], v: [&[f64]; 3], skip_above: f64) -> f64 {
    let coarse: Vec<(f64, f64)> = (0..=GRID)
        .flat_map(|i| (0..=GRID - i).map(move |j| (i as f64 / GRID as f64, j as f64 / GRID as f64)))
        .collect();
    let f = |al: f64, be: f64| {
        let y: Vec<f64> = (0..p.len()).map(|k| v[0][k] + al * (v[1][k] - v[0][k]) + be * (v[2][k] - v[0][k])).collect();
        flat_dist(p, &y)
    };
    let clamp = |al: f64, be: f64| {
        let (al, be) = (al.max(0.0), be.max(0.0));
        let s = al + be;
        if s > 1.0 {
            (al / s, be / s)
        } else {
            (al, be)
        }
    };
    zoom_min(f, clamp, &coarse, 1.0 / GRID as f64, skip_above)
}

fn edge_edge_bf(p: [&[f64]; 2], q: [&[f64]; 2], skip_above: f64) -> f64 {
    let coarse: Vec<(f64, f64)> = (0..=GRID)
        .flat_map(|i| (0..=GRID).map(move |j| (i as f64 / GRID as f64, j as f64 / GRID as f64)))
        .collect();
    let at = |e: [&[f64]; 2], s: f64| -> Vec<f64> { e[0].iter().zip(e[1]).map(|(a, b)| a + s * (b - a)).collect() };
    let f = |s: f64, u: f64| flat_dist(&at(p, s), &at(q, u));
    zoom_min(f, |s, u| (s.clamp(0.0, 1.0), u.clamp(0.0, 1.0)), &coarse, 1.0 / GRID as f64, skip_above)
}

fn det3(c0: [f64; 3], c1: [f64; 3], c2: [f64; 3]) -> f64 {
    c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) + c2[0] * (c0[1] * c1[2] - c0[2] * c1[1])
}

/// Solves `p0 + s (p1 - p0) = v0 + u (v1 - v0) + w (v2 - v0)` by Cramer's rule.
fn pierces(p: [&[f64]; 2], v: [&[f64]; 3]) -> bool {
    let d = |a: &[f64], b: &[f64]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dir = d(p[1], p[0]);
    let e1 = d(v[0], v[1]);
    let e2 = d(v[0], v[2]);
    let rhs = d(v[0], p[0]);
    let den = det3(dir, e1, e2);
    if den.abs() < 1e-300 {
        return false;
    }
    let s = det3(rhs, e1, e2) / den;
    let u = det3(dir, rhs, e2) / den;
    let w = det3(dir, e1, rhs) / den;
    (0.0..=1.0).contains(&s) && u >= 0.0 && w >= 0.0 && u + w <= 1.0
}

struct FlatMesh {
    c: Vec<Vec<f64>>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
}

impl FlatMesh {
    fn new(m: &Mesh) -> Self {
        let mut edges: Vec<[usize; 2]> = m
            .faces()
            .iter()
            .flat_map(|f| [[f[0], f[1]], [f[1], f[2]], [f[2], f[0]]])
            .map(|[i, j]| [i.min(j), i.max(j)])
            .collect();
        edges.sort();
        edges.dedup();
        FlatMesh {
            c: m.vertices().iter().map(flat).collect(),
            faces: m.faces().to_vec(),
            edges,
        }
    }

    fn span(&self, idx: &[usize]) -> f64 {
        let mut s: f64 = 0.0;
        for &i in idx {
            for &j in idx {
                s = s.max(flat_dist(&self.c[i], &self.c[j]));
            }
        }
        s
    }
}

/// Brute-force mesh distance: all vertex pairs, every vertex against every
/// face and every edge against every edge, and zero when an edge pierces a
/// face of the other mesh in `H^2 x R`.
///
/// Features are visited in order of a triangle-inequality lower bound; each
/// is searched on a coarse grid and zoomed in unless the coarse value
/// exceeds the best distance by more than its grid resolution.
pub fn brute_force_distance(a: &Mesh, b: &Mesh) -> f64 {
    let (fa, fb) = (FlatMesh::new(a), FlatMesh::new(b));
    if fa.c[0].len() == 3 {
        for (x, y) in [(&fa, &fb), (&fb, &fa)] {
            for e in &x.edges {
                for f in &y.faces {
                    if pierces([&x.c[e[0]], &x.c[e[1]]], [&y.c[f[0]], &y.c[f[1]], &y.c[f[2]]]) {
                        return 0.0;
                    }
                }
            }
        }
    }
    let m: Vec<Vec<f64>> = fa.c.iter().map(|p| fb.c.iter().map(|q| flat_dist(p, q)).collect()).collect();
    let mut best = m.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let face_span = |x: &FlatMesh| -> Vec<f64> { x.faces.iter().map(|f| x.span(f)).collect() };
    let edge_span = |x: &FlatMesh| -> Vec<f64> { x.edges.iter().map(|e| x.span(e)).collect() };
    let (sfa, sfb, sea, seb) = (face_span(&fa), face_span(&fb), edge_span(&fa), edge_span(&fb));
    // (lower bound, span, kind, i, k): kind 0 = vertex of A vs face of B,
    // 1 = vertex of B vs face of A, 2 = edge pair.
    let mut jobs: Vec<(f64, f64, u8, usize, usize)> = Vec::new();
    for i in 0..fa.c.len() {
        for (k, f) in fb.faces.iter().enumerate() {
            let lb = f.iter().map(|&j| m[i][j]).fold(f64::INFINITY, f64::min) - sfb[k];
            if lb <= best {
                jobs.push((lb, sfb[k], 0, i, k));
            }
        }
    }
    for j in 0..fb.c.len() {
        for (k, f) in fa.faces.iter().enumerate() {
            let lb = f.iter().map(|&i| m[i][j]).fold(f64::INFINITY, f64::min) - sfa[k];
            if lb <= best {
                jobs.push((lb, sfa[k], 1, j, k));
            }
        }
    }
    for (ie, e) in fa.edges.iter().enumerate() {
        for (jf, f) in fb.edges.iter().enumerate() {
            let near = e
                .iter()
                .flat_map(|&i| f.iter().map(move |&j| (i, j)))
                .map(|(i, j)| m[i][j])
                .fold(f64::INFINITY, f64::min);
            let lb = near - sea[ie] - seb[jf];
            if lb <= best {
                jobs.push((lb, sea[ie] + seb[jf], 2, ie, jf));
            }
        }
    }
    jobs.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (lb, span, kind, i, k) in jobs {
        if lb > best {
            break;
        }
        let skip = best + 2.0 * span / GRID as f64;
        let d = match kind {
            0 => {
                let f = fb.faces[k];
                vertex_face_bf(&fa.c[i], [&fb.c[f[0]], &fb.c[f[1]], &fb.c[f[2]]], skip)
            }
            1 => {
                let f = fa.faces[k];
                vertex_face_bf(&fb.c[i], [&fa.c[f[0]], &fa.c[f[1]], &fa.c[f[2]]], skip)
            }
            _ => {
                let (e, f) = (fa.edges[i], fb.edges[k]);
                edge_edge_bf([&fa.c[e[0]], &fa.c[e[1]]], [&fb.c[f[0]], &fb.c[f[1]]], skip)
            }
        };
        best = best.min(d);
    }
    best
}

fn sweeps(cfg: &VerifyConfig) -> Result<Vec<ReportEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let step = 0.1;
    let tol = 1e-6;
    let mut out = Vec::new();
    for k in 0..cfg.count(10, 3) {
        let th1: f64 = rng.gen_range(0.0..2.0 * PI);
        let th2 = th1 + rng.gen_range(0.8..PI);
        let g = Geodesic::from_angles(th1, th2)?;
        let (r1, r2): (f64, f64) = (rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7));
        let dt = rng.gen_range(-0.6..0.6) * (r1 + r2);
        let res = [8usize, 12, 16][rng.gen_range(0..3)];
        let moving = geodesic_sphere_mesh(&g, -2.5, dt, r1, res)?;
        let fixed = geodesic_sphere_mesh(&g, 0.0, 0.0, r2, res)?;
        let verts = moving.vertices().len().max(fixed.vertices().len());
        let fast = sweep_contact(&moving, &fixed, &g, SWEEP_RANGE, step, tol)?;
        let slow = sweep_with(&moving, &fixed, &g, SWEEP_RANGE, step, tol, |s| {
            brute_force_distance(&moving.translated(&Translation::new(&g, s)), &fixed)
        })?;
        let name = format!("sweep config {k}: r1={r1:.3}, r2={r2:.3}, dt={dt:.3}, res={res}");
        match (fast.status, slow.status, fast.contact, slow.contact) {
            (SweepStatus::Contact, SweepStatus::Contact, Some(sf), Some(ss)) => {
                out.push(
                    ReportEntry::abs_diff(8, name, ss, sf, step * SWEEP_AGREEMENT)
                        .with_details(format!("{verts} vertices per mesh")),
                );
            }
            (a, b, _, _) => out.push(
                ReportEntry::holds(8, name, 1).with_details(format!("statuses differ or no contact: {a:?} vs {b:?}")),
            ),
        }
        out.push(ReportEntry::at_most(8, format!("sweep config {k}: vertex count"), SWEEP_MAX_VERTICES as f64, verts as f64));
    }
    Ok(out)
}

fn closed_curve(n: usize, points: &[(f64, f64)]) -> Result<AsymptoticCurve> {
    let v = points
        .iter()
        .map(|&(th, t)| {
            let mut u = vec![0.0; n];
            u[0] = th.cos();
            u[1] = th.sin();
            IdealPoint::new(u, Some(t))
        })
        .collect::<Result<Vec<_>>>()?;
    AsymptoticCurve::new(v, true)
}

/// Directions sweeping the upper half-circle at height `lo`, back at `hi`.
pub fn half_circle_fixture(n: usize, lo: f64, hi: f64, count: usize) -> Result<AsymptoticCurve> {
    let mut pts: Vec<(f64, f64)> = (0..=count).map(|i| (PI * i as f64 / count as f64, lo)).collect();
    pts.extend((0..=count).rev().map(|i| (PI * i as f64 / count as f64, hi)));
    closed_curve(n, &pts)
}

fn obstruction_fixtures() -> Result<Vec<ReportEntry>> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let v = check_slab_projection(&half_circle_fixture(n, 0.2, 0.8, 64)?, n)?;
        let ok = v.status == Status::Obstructed && v.rule == Rule::SlabAndProjection;
        out.push(ReportEntry::holds(9, format!("half-circle in thin slab obstructed, n={n}"), usize::from(!ok)).with_details(v.details));
    }
    let ellipse: Vec<Vec<f64>> = (0..120)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / 120.0;
            vec![1.5 * th.cos(), 0.6 * th.sin()]
        })
        .collect();
    let v = check_strict_convexity(&ellipse, 2)?;
    let ok = v.status == Status::Obstructed && v.rule == Rule::StrictConvexity;
    out.push(ReportEntry::holds(9, "planar ellipse obstructed by strict convexity", usize::from(!ok)).with_details(v.details));
    for n in [2usize, 3] {
        let slab = PI / (n as f64 - 1.0);
        let pts: Vec<(f64, f64)> = (0..180)
            .map(|i| (2.0 * PI * i as f64 / 180.0, if i % 2 == 0 { -0.5 * slab - 0.05 } else { 0.5 * slab + 0.05 }))
            .collect();
        let v = check_slab_projection(&closed_curve(n, &pts)?, n)?;
        let ok = v.status == Status::NoObstructionDetected && v.rule == Rule::None;
        out.push(ReportEntry::holds(9, format!("full circle over a tall slab not obstructed, n={n}"), usize::from(!ok)).with_details(v.details));
    }
    Ok(out)
}

fn quadrature_honesty() -> Result<Vec<ReportEntry>> {
    let mut out = Vec::new();
    for tol in [1e-6, 1e-8, 1e-10] {
        let spec = QuadratureSpec::with_tol(tol)?;
        let bound = QUADRATURE_FACTOR * tol;
        let a = integrate_sqrt_singular(|u: f64| 1.0 / u.sqrt(), 0.0, 1.0, &spec)?;
        out.push(ReportEntry::abs_diff(10, format!("int_0^1 u^-1/2 at tol {tol:e}"), 2.0, a, bound));
        let b = integrate_improper(|u: f64| (-u).exp(), 0.0, 1.0, &spec)?;
        out.push(ReportEntry::abs_diff(10, format!("int_0^inf e^-u at tol {tol:e}"), 1.0, b, bound));
        let c = integrate_improper(|u: f64| (-2.0 * u).exp(), 1.0, 2.0, &spec)?;
        out.push(ReportEntry::abs_diff(10, format!("int_1^inf e^-2u at tol {tol:e}"), (-2.0f64).exp() / 2.0, c, bound));
    }
    Ok(out)
}
