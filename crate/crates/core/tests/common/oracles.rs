//! Brute-force reference computations shared by the integration tests.
//!
//! Everything here is deliberately naive and independent of the library's
//! adaptive quadrature, Newton inversion and Dormand-Prince paths.

#![allow(dead_code)]

/// Composite midpoint rule on `[lo, hi]` with `panels` panels.
pub fn midpoint(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    let mut comp = 0.0;
    for i in 0..panels {
        // Kahan summation keeps 10^7 panels honest.
        let y = f(lo + (i as f64 + 0.5) * h) - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    acc * h
}

/// sinh^{2n-2}(u) - sinh^{2n-2}(a) factored as
/// sinh(u-a) sinh(u+a) * sum_k sinh^{2k}(u) sinh^{2(n-2-k)}(a).
/// `delta = u - a` is passed separately so small offsets keep full precision.
fn sinh_power_gap(n: usize, a: f64, delta: f64) -> f64 {
    let u = a + delta;
    let su2 = u.sinh().powi(2);
    let sa2 = a.sinh().powi(2);
    let mut sum = 0.0;
    for k in 0..=(n - 2) {
        sum += su2.powi(k as i32) * sa2.powi((n - 2 - k) as i32);
    }
    delta.sinh() * (u + a).sinh() * sum
}

/// lambda(a, rho) by u = a + s^2 and a midpoint rule in s.
pub fn catenoid_lambda(n: usize, a: f64, rho: f64, panels: usize) -> f64 {
    let c = a.sinh().powi(n as i32 - 1);
    let s_max = (rho - a).sqrt();
    midpoint(
        |s| {
            2.0 * s * c / sinh_power_gap(n, a, s * s).sqrt()
        },
        0.0,
        s_max,
        panels,
    )
}

/// T(a), truncating the exponentially small tail at u - a = 60/(n-1).
pub fn catenoid_t(n: usize, a: f64, panels: usize) -> f64 {
    catenoid_lambda(n, a, a + 60.0 / (n as f64 - 1.0), panels)
}

/// f(a, t) by bisection on the midpoint-rule lambda.
pub fn catenoid_f(n: usize, a: f64, t: f64, panels: usize) -> f64 {
    let mut lo = a;
    let mut hi = a + 1.0;
    while catenoid_lambda(n, a, hi, panels) < t {
        hi = a + 2.0 * (hi - a);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if catenoid_lambda(n, a, mid, panels) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// H(d) and its partial integrals through the tau-form
/// d * int_1^tau (x^2-1)^{-1/2} (d^2 x^2 - 1)^{-1/2} dx with x = 1 + s^2.
/// Above `tau_max` the integrand's asymptotic expansion closes the tail.
pub fn md_height_tau(d: f64, tau: f64, panels: usize) -> f64 {
    let body = |s: f64| {
        let x = 1.0 + s * s;
        2.0 * d / ((2.0 + s * s).sqrt() * (d * d * x * x - 1.0).sqrt())
    };
    midpoint(body, 0.0, (tau - 1.0).sqrt(), panels)
}

pub fn md_h(d: f64, panels: usize) -> f64 {
    let tau_max: f64 = 1.0e4;
    let head = md_height_tau(d, tau_max, panels);
    // d * int_T^inf x^{-2} d^{-1} (1 + (1 + d^{-2}) x^{-2} / 2 + ...) dx
    let tail = 1.0 / tau_max + (1.0 + 1.0 / (d * d)) / (6.0 * tau_max.powi(3));
    head + tail
}

/// S(d) for n >= 3 by t = 1 + s^2 on [1, t_max] plus an asymptotic tail.
pub fn md_s(d: f64, n: usize, panels: usize) -> f64 {
    let m = 2 * n - 2;
    let a = d.powf(1.0 / (n as f64 - 1.0)).acosh();
    let ca = a.cosh();
    let t_max: f64 = 1.0e3;
    let body = |s: f64| {
        let t = 1.0 + s * s;
        // t^m - 1 = (t - 1) * sum_k t^k
        let mut geo = 0.0;
        for k in 0..m {
            geo += t.powi(k as i32);
        }
        2.0 * s * ca / ((s * s * geo).sqrt() * (ca * ca * t * t - 1.0).sqrt())
    };
    let head = midpoint(body, 0.0, (t_max - 1.0).sqrt(), panels);
    // integrand ~ t^{-n} / cosh(a) * (1 + x) with x = O(t^{-2}) for n >= 3.
    let p = n as f64;
    let tail = ca * (t_max.powf(1.0 - p) / (p - 1.0)) / ca
        + (0.5 / (ca * ca)) * t_max.powf(-1.0 - p) / (p + 1.0);
    head + tail
}

/// Fixed-step RK4 for f_tt = (n-1)(1+f_t^2)coth f from (a, 0).
/// Returns f on the grid t_k = k h, k = 0..=steps, stopping (with +inf) once
/// the slope exceeds `slope_stop`.
pub fn catenoid_rk4(n: usize, a: f64, h: f64, steps: usize, slope_stop: f64) -> Vec<f64> {
    let k = n as f64 - 1.0;
    let rhs = |y: [f64; 2]| [y[1], k * (1.0 + y[1] * y[1]) / y[0].tanh()];
    let mut y = [a, 0.0];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(a);
    for _ in 0..steps {
        if !y[1].is_finite() || y[1] > slope_stop {
            out.push(f64::INFINITY);
            continue;
        }
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        out.push(if y[1] > slope_stop { f64::INFINITY } else { y[0] });
    }
    out
}

/// Dense-sampling intersection oracle: sign changes of f(a,.) - f(b,.) on
/// `samples` points of (0, t_end], with the crossing located by linear
/// interpolation inside the isolating cell.
pub fn intersection_dense(n: usize, a: f64, b: f64, t_end: f64, samples: usize) -> Vec<f64> {
    let h = t_end / samples as f64;
    let fa = catenoid_rk4(n, a, h, samples, 1.0e6);
    let fb = catenoid_rk4(n, b, h, samples, 1.0e6);
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
        if g0 == 0.0 {
            roots.push((k - 1) as f64 * h);
        } else if g0 * g1 < 0.0 {
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
