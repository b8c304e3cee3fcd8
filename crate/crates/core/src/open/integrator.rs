//! Adaptive Dormand–Prince 5(4) stepping for linear complex ODEs.

use crate::error::{Error, Result};
use crate::operator::C64;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Tolerances and limits of the stepper.
///
/// The defaults are per-step targets two orders below the accuracy the
/// results are quoted at, so accumulated error over a long grid stays
/// under 1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: 1e-12,
            rtol: 1e-10,
            max_steps: 5_000_000,
        }
    }
}

/// Integrates `y' = f(y)` (autonomous) with error control. The last accepted
/// step size carries over between calls to [`Dopri5::advance`].
pub struct Dopri5 {
    tol: Tolerance,
    h: Option<f64>,
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    y_new: Vec<C64>,
    steps: usize,
}

impl Dopri5 {
    pub fn new(dim: usize, tol: Tolerance) -> Self {
        let zeros = || vec![C64::new(0.0, 0.0); dim];
        Dopri5 {
            tol,
            h: None,
            k: [
                zeros(),
                zeros(),
                zeros(),
                zeros(),
                zeros(),
                zeros(),
                zeros(),
            ],
            stage: zeros(),
            y_new: zeros(),
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn combine(&mut self, y: &[C64], h: f64, coeffs: &[(usize, f64)]) {
        for (i, out) in self.stage.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &(j, a) in coeffs {
                acc += self.k[j][i] * a;
            }
            *out = y[i] + acc * h;
        }
    }

    fn error_norm(&self, y: &[C64], h: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..y.len() {
            let err = (self.k[0][i] * E1
                + self.k[2][i] * E3
                + self.k[3][i] * E4
                + self.k[4][i] * E5
                + self.k[5][i] * E6
                + self.k[6][i] * E7)
                * h;
            let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(self.y_new[i].norm());
            sum += (err.norm() / scale).powi(2);
        }
        (sum / y.len().max(1) as f64).sqrt()
    }

    /// Advances `y` from `t0` to exactly `t1` (`t1 >= t0`).
    pub fn advance<F>(&mut self, f: &mut F, y: &mut [C64], t0: f64, t1: f64) -> Result<()>
    where
        F: FnMut(&[C64], &mut [C64]),
    {
        if t1 < t0 {
            return Err(Error::StepSize {
                t: t0,
                reason: "time grid must be ascending".into(),
            });
        }
        if t1 == t0 {
            return Ok(());
        }
        let span = t1 - t0;
        let mut t = t0;
        let mut h = self.h.unwrap_or(1e-2 * span);
        f(y, &mut self.k[0]);
        while t < t1 {
            let remaining = t1 - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let step = if last { remaining } else { h };

            self.combine(y, step, &[(0, A21)]);
            f(&self.stage, &mut self.k[1]);
            self.combine(y, step, &[(0, A31), (1, A32)]);
            f(&self.stage, &mut self.k[2]);
            self.combine(y, step, &[(0, A41), (1, A42), (2, A43)]);
            f(&self.stage, &mut self.k[3]);
            self.combine(y, step, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            f(&self.stage, &mut self.k[4]);
            self.combine(y, step, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            f(&self.stage, &mut self.k[5]);
            self.combine(y, step, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
            std::mem::swap(&mut self.stage, &mut self.y_new);
            f(&self.y_new, &mut self.k[6]);

            let err = self.error_norm(y, step);
            if !err.is_finite() {
                return Err(Error::StepSize {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            self.steps += 1;
            if self.steps > self.tol.max_steps {
                return Err(Error::StepSize {
                    t,
                    reason: format!("exceeded {} steps", self.tol.max_steps),
                });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if last { t1 } else { t + step };
                y.copy_from_slice(&self.y_new);
                // First-same-as-last: the final stage is the next step's first.
                self.k.swap(0, 6);
                if !last {
                    h = step * factor;
                } else {
                    h = h.max(step);
                }
            } else {
                h = step * factor.min(1.0);
                if h < 1e-14 * t1.abs().max(1.0) {
                    return Err(Error::StepSize {
                        t,
                        reason: format!("step size underflow (h = {h:e})"),
                    });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }
}
