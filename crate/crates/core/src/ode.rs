//! Dormand-Prince 5(4) integration for small autonomous systems.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-12, atol: 1e-12 }
    }
}

/// Adaptive integrator state for `y' = rhs(y)`.
pub struct DormandPrince<F, const N: usize> {
    rhs: F,
    tol: Tolerances,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
}

impl<F: Fn(&[f64; N]) -> [f64; N], const N: usize> DormandPrince<F, N> {
    pub fn new(rhs: F, t0: f64, y0: [f64; N], h0: f64, tol: Tolerances) -> Self {
        DormandPrince { rhs, tol, t: t0, y: y0, h: h0 }
    }

    /// Advances to exactly `t_end`, adapting the step size on the way.
    /// `stop` is checked after every accepted step; when it fires the
    /// integration halts early and `Ok(false)` is returned.
    pub fn advance_to(&mut self, t_end: f64, stop: impl Fn(&[f64; N]) -> bool) -> Result<bool> {
        while self.t < t_end {
            let remaining = t_end - self.t;
            // Stretch a step that would stop just short of the target.
            let landing = 1.001 * self.h >= remaining;
            let h = if landing { remaining } else { self.h };
            if self.h < 1e-14 * (1.0 + self.t.abs()) {
                return Err(Error::Integration(format!(
                    "step size underflow (h = {:e}) at t = {}",
                    self.h, self.t
                )));
            }
            let (y_new, err) = self.trial(h);
            if err <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
                self.t = if landing { t_end } else { self.t + h };
                self.y = y_new;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A shortened landing step says nothing about the natural size.
                if !landing || grow < 1.0 {
                    self.h = h * grow;
                }
                if stop(&self.y) {
                    return Ok(false);
                }
            } else {
                let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
                self.h = h * shrink;
            }
        }
        Ok(true)
    }

    fn trial(&self, h: f64) -> ([f64; N], f64) {
        let mut k = [[0.0; N]; 7];
        k[0] = (self.rhs)(&self.y);
        for s in 1..7 {
            let mut ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = (self.rhs)(&ys);
        }
        // Stage 7 is evaluated at the fifth-order solution (FSAL).
        let mut y_new = self.y;
        for (j, kj) in k.iter().enumerate().take(6) {
            for i in 0..N {
                y_new[i] += h * A[6][j] * kj[i];
            }
        }
        let mut err = 0.0f64;
        for i in 0..N {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            let scale = self.tol.atol + self.tol.rtol * self.y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        (y_new, if err.is_nan() { f64::INFINITY } else { err })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let mut dp = DormandPrince::new(|y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 0.1, Tolerances::default());
        assert!(dp.advance_to(10.0, |_| false).unwrap());
        assert_eq!(dp.t, 10.0);
        assert!((dp.y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((dp.y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn blow_up_triggers_stop() {
        // y' = y^2 from y(0) = 1 blows up at t = 1.
        let mut dp = DormandPrince::new(|y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 1e-3, Tolerances::default());
        let done = dp.advance_to(2.0, |y| y[0] > 1e3).unwrap();
        assert!(!done);
        assert!((dp.t - (1.0 - 1.0 / dp.y[0])).abs() < 1e-9);
    }

    #[test]
    fn underflow_reported() {
        let mut dp = DormandPrince::new(|y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 1e-3, Tolerances::default());
        assert!(matches!(dp.advance_to(2.0, |_| false), Err(Error::Integration(_))));
    }
}
