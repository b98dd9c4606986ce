//! Dormand–Prince 5(4) integrator over fixed-size real state arrays.
//!
//! Complex systems are integrated by packing real and imaginary parts
//! into the array. Accepted steps are reported to a callback which may
//! rescale the state in place (used for frame renormalisation) or stop
//! the integration.

use std::fmt;

// Butcher tableau.
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

// Error coefficients: fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    StepSizeUnderflow { t: f64, h: f64 },
    MaxSteps { t: f64 },
    NonFinite { t: f64 },
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepSizeUnderflow { t, h } => {
                write!(f, "step size underflow (h = {h:.3e}) at t = {t}")
            }
            OdeError::MaxSteps { t } => write!(f, "maximum step count reached at t = {t}"),
            OdeError::NonFinite { t } => write!(f, "non-finite state at t = {t}"),
        }
    }
}

impl std::error::Error for OdeError {}

/// What the step callback wants the integrator to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    /// The callback modified the state; derivative caches are refreshed.
    Modified,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub h_max: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: f64::INFINITY,
            h_init: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub stopped: bool,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn with_max_step(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrates `y' = f(t, y)` from `t0` towards `t_end` (either direction).
    ///
    /// `on_step(t, y)` is called after every accepted step, including the
    /// final one that lands on `t_end`.
    pub fn integrate<const N: usize, F, S>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut on_step: S,
    ) -> Result<Outcome<N>, OdeError>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &mut [f64; N]) -> StepControl,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut out = Outcome {
            t,
            y,
            accepted: 0,
            rejected: 0,
            stopped: false,
        };
        if span == 0.0 {
            return Ok(out);
        }
        let mut h = match self.h_init {
            Some(h) => h.abs(),
            None => self.initial_step(&mut f, t, &y, &k1, dir),
        }
        .min(self.h_max)
        .min(span);

        let mut steps = 0usize;
        while (t_end - t) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(OdeError::MaxSteps { t });
            }
            let remaining = (t_end - t).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(OdeError::StepSizeUnderflow { t, h });
            }
            let hs = h * dir;
            let (y_new, k7, err) = self.trial_step(&mut f, t, &y, &k1, hs);
            if !err.is_finite() {
                out.rejected += 1;
                h *= FAC_MIN;
                continue;
            }
            if err <= 1.0 {
                t = if last { t_end } else { t + hs };
                y = y_new;
                k1 = k7;
                out.accepted += 1;
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(OdeError::NonFinite { t });
                }
                match on_step(t, &mut y) {
                    StepControl::Continue => {}
                    StepControl::Modified => k1 = f(t, &y),
                    StepControl::Stop => {
                        out.stopped = true;
                        break;
                    }
                }
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                };
                h = (h * fac).min(self.h_max);
            } else {
                out.rejected += 1;
                let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
                h *= fac;
            }
        }
        out.t = t;
        out.y = y;
        Ok(out)
    }

    fn trial_step<const N: usize, F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], f64)
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut tmp = [0.0; N];
        for i in 0..N {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(t + C2 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(t + C3 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(t + C4 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(t + C5 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(t + h, &tmp);
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let k7 = f(t + h, &y_new);
        let mut acc = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            acc += (e / sc) * (e / sc);
        }
        (y_new, k7, (acc / N as f64).sqrt())
    }

    // Hairer–Nørsett–Wanner starting step heuristic.
    fn initial_step<const N: usize, F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        dir: f64,
    ) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 += (y[i] / sc).powi(2);
            d1 += (k1[i] / sc).powi(2);
        }
        d0 = (d0 / N as f64).sqrt();
        d1 = (d1 / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y[i] + dir * h0 * k1[i];
        }
        let k2 = f(t + dir * h0, &y1);
        let mut d2 = 0.0;
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d2 += ((k2[i] - k1[i]) / sc).powi(2);
        }
        d2 = (d2 / N as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        let h = (100.0 * h0).min(h1);
        if h.is_finite() && h > 0.0 {
            h
        } else {
            1e-6
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let solver = Dopri5::new(1e-11, 1e-13);
        let out = solver
            .integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, |_, _| StepControl::Continue)
            .unwrap();
        assert!((out.y[0] - (-5.0f64).exp()).abs() < 1e-11);
        assert_eq!(out.t, 5.0);
    }

    #[test]
    fn harmonic_oscillator_backward() {
        let solver = Dopri5::new(1e-11, 1e-13);
        let out = solver
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [1.0, 0.0],
                -3.0,
                |_, _| StepControl::Continue,
            )
            .unwrap();
        assert!((out.y[0] - 3.0f64.cos()).abs() < 1e-9);
        assert!((out.y[1] - 3.0f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn callback_can_stop_and_rescale() {
        let solver = Dopri5::new(1e-9, 1e-12).with_max_step(0.1);
        let mut seen = 0;
        let out = solver
            .integrate(
                |_, y: &[f64; 1]| [y[0]],
                0.0,
                [1.0],
                10.0,
                |t, y| {
                    seen += 1;
                    y[0] = 1.0;
                    if t > 1.0 {
                        StepControl::Stop
                    } else {
                        StepControl::Modified
                    }
                },
            )
            .unwrap();
        assert!(out.stopped);
        assert!(out.t > 1.0 && out.t < 1.2);
        assert!(seen >= 10);
    }

    #[test]
    fn fifth_order_convergence() {
        // Error should drop by ~2^5 when the fixed step is halved.
        let run = |h: f64| {
            let solver = Dopri5 {
                rtol: 1.0,
                atol: 1.0,
                h_max: h,
                h_init: Some(h),
                max_steps: 100_000,
            };
            let out = solver
                .integrate(
                    |t, y: &[f64; 1]| [y[0] * t.cos()],
                    0.0,
                    [1.0],
                    2.0,
                    |_, _| StepControl::Continue,
                )
                .unwrap();
            (out.y[0] - 2.0f64.sin().exp()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!(ratio > 20.0 && ratio < 50.0, "ratio {ratio}");
    }
}
