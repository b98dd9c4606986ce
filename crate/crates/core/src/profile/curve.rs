use serde::Serialize;

use super::{equilibrium_jacobian, hamiltonian, rhs};
use crate::shock_states::ShockParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub y: f64,
    #[serde(rename = "P")]
    pub p: f64,
    /// Scaled slope `Q̃ = k²P′/2`.
    #[serde(rename = "Q")]
    pub q: f64,
}

/// Linearised behaviour beyond the sampled window, anchored at `y0`.
///
/// `Decay` keeps the full 2×2 linear flow (node or focus end);
/// `Mode` keeps a single eigen-direction, used on the saddle side where the
/// other direction would grow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tail {
    Decay {
        y0: f64,
        p_eq: f64,
        dev0: [f64; 2],
        jacobian: [[f64; 2]; 2],
    },
    Mode {
        y0: f64,
        p_eq: f64,
        amplitude: f64,
        rate: f64,
        vector: [f64; 2],
    },
}

impl Tail {
    pub fn equilibrium(&self) -> f64 {
        match *self {
            Tail::Decay { p_eq, .. } | Tail::Mode { p_eq, .. } => p_eq,
        }
    }

    /// Exponential decay rate towards the equilibrium, per unit `|y|`.
    pub fn decay_rate(&self) -> f64 {
        match *self {
            Tail::Decay { jacobian, .. } => {
                let tr = jacobian[0][0] + jacobian[1][1];
                let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
                let disc = 0.25 * tr * tr - det;
                if disc >= 0.0 {
                    (0.5 * tr.abs() - disc.sqrt()).abs()
                } else {
                    0.5 * tr.abs()
                }
            }
            Tail::Mode { rate, .. } => rate.abs(),
        }
    }

    /// `(P, P′, P″)` and `Q̃` at `y`.
    fn eval(&self, y: f64) -> ([f64; 3], f64) {
        match *self {
            Tail::Decay {
                y0,
                p_eq,
                dev0,
                jacobian,
            } => {
                let e = expm2(&jacobian, y - y0);
                let d = mat_vec(&e, dev0);
                let d1 = mat_vec(&jacobian, d);
                let d2 = mat_vec(&jacobian, d1);
                ([p_eq + d[0], d1[0], d2[0]], d[1])
            }
            Tail::Mode {
                y0,
                p_eq,
                amplitude,
                rate,
                vector,
            } => {
                let c = amplitude * (rate * (y - y0)).exp();
                (
                    [p_eq + c * vector[0], rate * c * vector[0], rate * rate * c * vector[0]],
                    c * vector[1],
                )
            }
        }
    }
}

fn mat_vec(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Closed-form exponential of a real 2×2 matrix times `t`.
pub(crate) fn expm2(m: &[[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let tau = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tau * tau - det;
    let (c, sh) = if disc.abs() < 1e-300 {
        (1.0, t)
    } else if disc > 0.0 {
        let w = disc.sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        let w = (-disc).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    };
    let g = (tau * t).exp();
    let n = [[m[0][0] - tau, m[0][1]], [m[1][0], m[1][1] - tau]];
    [
        [g * (c + sh * n[0][0]), g * sh * n[0][1]],
        [g * sh * n[1][0], g * (c + sh * n[1][1])],
    ]
}

/// A travelling-wave profile sampled on an increasing `y` grid, with
/// quintic Hermite interpolation inside and linear tails outside.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileCurve {
    pub params: ShockParams,
    pub p_minus: f64,
    pub p_plus: f64,
    pub samples: Vec<ProfileSample>,
    /// Ordinate of the first half-density crossing (the origin after anchoring).
    pub y_mid: f64,
    pub monotone: bool,
    pub oscillation_count: usize,
    /// Distances of the first and last samples to `(P⁻, 0)` and `(P⁺, 0)`.
    pub endpoint_residuals: [f64; 2],
    pub left_tail: Tail,
    pub right_tail: Tail,
    /// Samples produced by the integrator, as a range into `samples`.
    pub integrated: (usize, usize),
    /// `true` when shooting ran in the reflected frame (`s < 0`).
    pub reflected: bool,
    #[serde(skip)]
    dp: Vec<f64>,
    #[serde(skip)]
    d2p: Vec<f64>,
}

impl ProfileCurve {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        params: ShockParams,
        p_minus: f64,
        p_plus: f64,
        samples: Vec<ProfileSample>,
        left_tail: Tail,
        right_tail: Tail,
        integrated: (usize, usize),
        reflected: bool,
    ) -> Self {
        let k2 = params.k * params.k;
        let (dp, d2p) = samples
            .iter()
            .map(|s| {
                let (d1, dq) = rhs(&params, s.p, s.q, params.s, false);
                (d1, 2.0 * dq / k2)
            })
            .unzip();
        let oscillation_count = sign_changes(samples.iter().map(|s| s.q));
        let first = samples.first().copied().unwrap();
        let last = samples.last().copied().unwrap();
        let endpoint_residuals = [
            (first.p - p_minus).hypot(first.q),
            (last.p - p_plus).hypot(last.q),
        ];
        Self {
            params,
            p_minus,
            p_plus,
            samples,
            y_mid: 0.0,
            monotone: oscillation_count == 0,
            oscillation_count,
            endpoint_residuals,
            left_tail,
            right_tail,
            integrated,
            reflected,
            dp,
            d2p,
        }
    }

    /// Constant state `P ≡ p`; every derivative vanishes.
    pub fn constant(params: ShockParams, p: f64) -> Self {
        let samples = vec![
            ProfileSample { y: -1.0, p, q: 0.0 },
            ProfileSample { y: 1.0, p, q: 0.0 },
        ];
        let jacobian = equilibrium_jacobian(&params, p, params.s);
        let tail = |y0| Tail::Decay {
            y0,
            p_eq: p,
            dev0: [0.0, 0.0],
            jacobian,
        };
        let mut c = Self::assemble(params, p, p, samples, tail(-1.0), tail(1.0), (0, 2), false);
        c.dp = vec![0.0; 2];
        c.d2p = vec![0.0; 2];
        c.endpoint_residuals = [0.0; 2];
        c
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.samples[0].y, self.samples[self.samples.len() - 1].y)
    }

    /// `(P, P′, P″)` at `y`.
    pub fn derivatives(&self, y: f64) -> [f64; 3] {
        self.eval(y).0
    }

    /// `(P, Q̃)` at `y`.
    pub fn state(&self, y: f64) -> (f64, f64) {
        let (d, q) = self.eval(y);
        (d[0], q)
    }

    /// Momentum `J = sP − A`.
    pub fn momentum(&self, y: f64) -> f64 {
        self.params.s * self.state(y).0 - self.params.a
    }

    fn eval(&self, y: f64) -> ([f64; 3], f64) {
        let (lo, hi) = self.y_range();
        if y <= lo {
            return self.left_tail.eval(y);
        }
        if y >= hi {
            return self.right_tail.eval(y);
        }
        let i = self.samples.partition_point(|s| s.y <= y).clamp(1, self.samples.len() - 1) - 1;
        let d = self.hermite(i, y);
        (d, 0.5 * self.params.k * self.params.k * d[1])
    }

    fn hermite(&self, i: usize, y: f64) -> [f64; 3] {
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.y - a.y;
        let t = (y - a.y) / h;
        let (t2, t3, t4, t5) = (t * t, t * t * t, t.powi(4), t.powi(5));
        let v = [
            a.p,
            h * self.dp[i],
            h * h * self.d2p[i],
            b.p,
            h * self.dp[i + 1],
            h * h * self.d2p[i + 1],
        ];
        let basis = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * (t3 - 2.0 * t4 + t5),
        ];
        let d1 = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
        ];
        let d2 = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3),
        ];
        let dot = |w: &[f64; 6]| w.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        [dot(&basis), dot(&d1) / h, dot(&d2) / (h * h)]
    }

    /// Shifts the ordinate so that the first crossing of the mid density is `y = 0`.
    pub(crate) fn anchor_at_mid_density(&mut self) {
        let mid = 0.5 * (self.p_minus + self.p_plus);
        let above = |p: f64| p > mid;
        let Some(i) = self
            .samples
            .windows(2)
            .position(|w| above(w[0].p) != above(w[1].p))
        else {
            return;
        };
        let (mut a, mut b) = (self.samples[i].y, self.samples[i + 1].y);
        let start = above(self.samples[i].p);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if above(self.hermite(i, m)[0]) == start {
                a = m;
            } else {
                b = m;
            }
        }
        let shift = 0.5 * (a + b);
        for s in &mut self.samples {
            s.y -= shift;
        }
        for tail in [&mut self.left_tail, &mut self.right_tail] {
            match tail {
                Tail::Decay { y0, .. } | Tail::Mode { y0, .. } => *y0 -= shift,
            }
        }
        self.y_mid = 0.0;
    }

    /// Hamiltonian `H(P, Q̃)` (zero at the saddle) at every sample.
    pub fn hamiltonian_values(&self) -> Vec<f64> {
        let p_saddle = if self.reflected { self.p_plus } else { self.p_minus };
        self.samples
            .iter()
            .map(|s| hamiltonian(&self.params, s.p, s.q, p_saddle))
            .collect()
    }

    /// Largest decrease of `H` between consecutive integrator steps, taken in
    /// the direction of integration. Non-positive when `H` never decreases.
    pub fn confinement_defect(&self) -> f64 {
        let h = self.hamiltonian_values();
        let (a, b) = self.integrated;
        h[a..b]
            .windows(2)
            .map(|w| if self.reflected { w[1] - w[0] } else { w[0] - w[1] })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Momentum reconstructed at the first and last sample.
    pub fn end_momenta(&self) -> (f64, f64) {
        let s = self.params.s;
        let a = self.params.a;
        (
            s * self.samples[0].p - a,
            s * self.samples[self.samples.len() - 1].p - a,
        )
    }
}

fn sign_changes(values: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm2_matches_series() {
        for m in [
            [[0.0, 1.0], [-4.0, -0.5]],
            [[0.0, 1.0], [2.0, -1.0]],
            [[-1.0, 1.0], [0.0, -1.0]],
        ] {
            let t = 0.7;
            // Taylor series oracle.
            let mut term = [[1.0, 0.0], [0.0, 1.0]];
            let mut sum = term;
            for n in 1..60 {
                let mut next = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        next[i][j] = (0..2).map(|l| term[i][l] * m[l][j]).sum::<f64>() * t / n as f64;
                    }
                }
                term = next;
                for i in 0..2 {
                    for j in 0..2 {
                        sum[i][j] += term[i][j];
                    }
                }
            }
            let e = expm2(&m, t);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((e[i][j] - sum[i][j]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn sign_changes_skip_zeros() {
        assert_eq!(sign_changes([1.0, 0.0, -1.0, -2.0, 3.0].into_iter()), 2);
        assert_eq!(sign_changes([0.0, 0.0].into_iter()), 0);
    }

    #[test]
    fn hermite_reproduces_quintic() {
        let params = ShockParams::new(1.0, 1.0, 2f64.sqrt(), 1.0, 1.0, 3.0).unwrap();
        let poly = |y: f64| 1.0 + 0.3 * y - 0.2 * y * y + 0.05 * y.powi(5);
        let dpoly = |y: f64| 0.3 - 0.4 * y + 0.25 * y.powi(4);
        let d2poly = |y: f64| -0.4 + y.powi(3);
        let mut c = ProfileCurve::constant(params, 1.0);
        c.samples = vec![
            ProfileSample { y: 0.0, p: poly(0.0), q: 0.0 },
            ProfileSample { y: 0.8, p: poly(0.8), q: 0.0 },
        ];
        c.dp = vec![dpoly(0.0), dpoly(0.8)];
        c.d2p = vec![d2poly(0.0), d2poly(0.8)];
        for y in [0.1, 0.33, 0.79] {
            let d = c.derivatives(y);
            assert!((d[0] - poly(y)).abs() < 1e-14);
            assert!((d[1] - dpoly(y)).abs() < 1e-13);
            assert!((d[2] - d2poly(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_curve_has_no_slope() {
        let params = ShockParams::new(1.5, 1.0, 2f64.sqrt(), 1.0, 1.0, 1.1).unwrap();
        let c = ProfileCurve::constant(params, 0.8);
        for y in [-50.0, -0.5, 0.0, 3.0, 80.0] {
            assert_eq!(c.derivatives(y), [0.8, 0.0, 0.0]);
        }
        assert!(c.monotone);
    }
}
