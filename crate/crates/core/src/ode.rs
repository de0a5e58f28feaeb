//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size real systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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

// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

pub(crate) struct Dopri5<const N: usize> {
    tol: Tolerance,
    h: f64,
    pub steps: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += h * coef * k[i];
        }
    }
    out
}

impl<const N: usize> Dopri5<N> {
    pub fn new(tol: Tolerance) -> Self {
        Dopri5 {
            tol,
            h: 0.0,
            steps: 0,
            rejected: 0,
        }
    }

    /// Advance `y` from `t0` to exactly `t1`. The step size carries over
    /// between calls so dense sampling of a trajectory costs little extra.
    pub fn advance<F>(&mut self, f: &F, t0: f64, t1: f64, y: &mut [f64; N]) -> Result<()>
    where
        F: Fn(f64, &[f64; N], &mut [f64; N]),
    {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(f, t0, y, span);
        }
        let h_min = 1e-14 * t1.abs().max(span);

        let mut t = t0;
        let mut k1 = [0.0; N];
        f(t, y, &mut k1);
        while t < t1 {
            let last = t + self.h >= t1;
            let h = if last { t1 - t } else { self.h };

            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]), &mut k2);
            f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]), &mut k3);
            f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut k4);
            f(
                t + C5 * h,
                &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                &mut k5,
            );
            f(
                t + h,
                &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                &mut k6,
            );
            let y_new = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            f(t + h, &y_new, &mut k7);

            let mut err = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / scale).powi(2);
            }
            let err = (err / N as f64).sqrt();

            let factor = if !err.is_finite() {
                0.2
            } else if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                *y = y_new;
                k1 = k7;
                self.steps += 1;
                // Keep the proposed step when the accepted one was clipped
                // to land on t1.
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.rejected += 1;
                self.h = h * factor.min(1.0);
            }
            if self.h < h_min {
                return Err(Error::StepUnderflow { time: t });
            }
        }
        Ok(())
    }

    fn initial_step<F>(&self, f: &F, t0: f64, y: &[f64; N], span: f64) -> f64
    where
        F: Fn(f64, &[f64; N], &mut [f64; N]),
    {
        let mut dy = [0.0; N];
        f(t0, y, &mut dy);
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let scale = self.tol.atol + self.tol.rtol * y[i].abs();
            d0 += (y[i] / scale).powi(2);
            d1 += (dy[i] / scale).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span
        } else {
            0.01 * d0 / d1
        };
        h.min(span)
    }
}
