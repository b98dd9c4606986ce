//! Explicit eigenvalue bounds along a profile: a real-part bound from an
//! energy estimate and a high-frequency exclusion radius from an
//! exponential-dichotomy perturbation argument.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evans::system::Coefficients;
use crate::evans::Contour;
use crate::profile::ProfileCurve;
use crate::shock_states::ShockParams;

type C = Complex64;

/// Coefficient functions entering the energy estimate at one ordinate.
///
/// Here `f1 = J²/P − γP^{γ−1}` (note `J²/P`, unlike the Evans coefficients).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCoefficients {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
}

impl EnergyCoefficients {
    pub fn at(params: &ShockParams, d: [f64; 3]) -> Self {
        let [p, dp, _] = d;
        let (s, a, g, k2) = (params.s, params.a, params.gamma, params.k * params.k);
        let j = s * p - a;
        Self {
            f1: j * j / p - g * p.powf(g - 1.0),
            f2: 2.0 * j * s * dp / p - j * j * dp / (p * p) - g * (g - 1.0) * p.powf(g - 2.0) * dp,
            f3: a * dp / (p * p),
            f4: k2 * dp * dp / (2.0 * p * p),
            f5: k2 * dp / p,
        }
    }
}

/// Profile suprema `M1..M5` of the energy estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySuprema {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub m5: f64,
}

impl EnergySuprema {
    /// Suprema over the profile samples and both end states.
    pub fn from_profile(profile: &ProfileCurve) -> Self {
        let ends = [[profile.p_minus, 0.0, 0.0], [profile.p_plus, 0.0, 0.0]];
        let points = profile.samples.iter().map(|s| profile.derivatives(s.y)).chain(ends);
        Self::from_points(&profile.params, points)
    }

    /// Suprema over `(P, P′, P″)` triples.
    pub fn from_points(params: &ShockParams, points: impl IntoIterator<Item = [f64; 3]>) -> Self {
        let mut m = Self {
            m1: 0.0,
            m2: 0.0,
            m3: 0.0,
            m4: 0.0,
            m5: 0.0,
        };
        for d in points {
            let c = EnergyCoefficients::at(params, d);
            m.m1 = m.m1.max(c.f1 * c.f1);
            m.m2 = m.m2.max(c.f2 * c.f2);
            m.m3 = m.m3.max(c.f3.abs());
            m.m4 = m.m4.max(c.f4 * c.f4);
            m.m5 = m.m5.max(c.f5 * c.f5);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBoundReport {
    pub suprema: EnergySuprema,
    pub eps: [f64; 3],
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `max(C1, C2, 2C3/k²)`
    pub bound: f64,
}

fn ratio(m: f64, eps: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m / eps
    }
}

/// Evaluates the bound for given Young parameters, checking feasibility.
pub fn energy_constants(m: &EnergySuprema, eps: [f64; 3], mu: f64, k: f64) -> Result<EnergyBoundReport> {
    let [e1, e2, e3] = eps;
    let sum = 0.5 * e1 + 0.5 * e3;
    if !(e1 > 0.0) || !(e2 > 0.0) || !(e3 >= 0.0) || !(sum < mu) {
        return Err(Error::InfeasibleEps { sum, mu });
    }
    let c1 = 0.5 / e1 + ratio(m.m2, e2) + ratio(m.m4, e3);
    let c2 = 0.5 * e2 + m.m3;
    let c3 = ratio(m.m1, e2) + ratio(m.m5, e3);
    Ok(EnergyBoundReport {
        suprema: *m,
        eps,
        c1,
        c2,
        c3,
        bound: c1.max(c2).max(2.0 * c3 / (k * k)),
    })
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
fn golden<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol {
        // `<=` keeps the left point on ties, favouring smaller arguments.
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Fraction of the budget `ε1 + ε3 < 2μ` actually used.
const BUDGET: f64 = 1.0 - 1e-10;

/// Minimises the bound over the feasible Young parameters.
///
/// All three constants decrease in `ε1` and `ε3`, so the optimum uses the
/// whole budget; the split `t = ε1/(ε1 + ε3)` and `ln ε2` are then searched
/// by nested golden sections (the objective is convex in `(ε1, ε2, ε3)`).
pub fn optimize_eps(m: &EnergySuprema, mu: f64, k: f64) -> Result<EnergyBoundReport> {
    if !(mu > 0.0) {
        return Err(Error::domain("mu", mu));
    }
    let total = 2.0 * mu * BUDGET;
    let eval = |t: f64, e2: f64| {
        let t = t.clamp(0.0, 1.0);
        let eps = [total * t.max(1e-300), e2, total * (1.0 - t)];
        energy_constants(m, eps, mu, k).map(|r| r.bound).unwrap_or(f64::INFINITY)
    };
    let best_t = |e2: f64| {
        // t = 1 drops ε3 entirely, available only when its terms vanish.
        let hi = if m.m4 == 0.0 && m.m5 == 0.0 { 1.0 } else { 1.0 - 1e-15 };
        let (t, v) = golden(|t| eval(t, e2), 1e-15, hi, 1e-13);
        if hi == 1.0 && eval(1.0, e2) <= v {
            (1.0, eval(1.0, e2))
        } else {
            (t, v)
        }
    };
    let start = (2.0 * m.m1.max(m.m2)).sqrt().max(mu);
    let (lo, hi) = ((start * 1e-12).ln(), (start * 1e12).ln());
    let (le2, _) = golden(|le2| best_t(le2.exp()).1, lo, hi, 1e-12);
    let e2 = le2.exp();
    let (t, _) = best_t(e2);
    energy_constants(m, [total * t, e2, total * (1.0 - t)], mu, k)
}

/// Energy bound along `profile`; `eps` overrides the optimisation.
pub fn energy_bound(profile: &ProfileCurve, eps: Option<[f64; 3]>) -> Result<EnergyBoundReport> {
    let p = profile.params;
    let m = EnergySuprema::from_profile(profile);
    match eps {
        Some(e) => energy_constants(&m, e, p.mu, p.k),
        None => optimize_eps(&m, p.mu, p.k),
    }
}

/// Half-line suprema feeding `m1..m4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineSuprema {
    /// `sup |f2′|`
    pub df2: f64,
    /// `sup |f1′ + s f2′ + f3|`
    pub first_order: f64,
    /// `sup |f2 + s|`
    pub convective: f64,
    /// `sup |f1 + s f2 + f4|`
    pub second_order: f64,
    /// `sup |sμ + f5|`
    pub third_order: f64,
}

impl HalfLineSuprema {
    fn update(&mut self, params: &ShockParams, c: &Coefficients) {
        let s = params.s;
        self.df2 = self.df2.max(c.df2.abs());
        self.first_order = self.first_order.max((c.df1 + s * c.df2 + c.f3).abs());
        self.convective = self.convective.max((c.f2 + s).abs());
        self.second_order = self.second_order.max((c.f1 + s * c.f2 + c.f4).abs());
        self.third_order = self.third_order.max((s * params.mu + c.f5).abs());
    }

    /// `(x ≤ 0, x ≥ 0)` suprema, split at the profile anchor.
    pub fn from_profile(profile: &ProfileCurve) -> (Self, Self) {
        let params = profile.params;
        let zero = Self {
            df2: 0.0,
            first_order: 0.0,
            convective: 0.0,
            second_order: 0.0,
            third_order: 0.0,
        };
        let (mut left, mut right) = (zero, zero);
        let at = |d: [f64; 3]| Coefficients::at(&params, d);
        left.update(&params, &at([profile.p_minus, 0.0, 0.0]));
        right.update(&params, &at([profile.p_plus, 0.0, 0.0]));
        let origin = at(profile.derivatives(0.0));
        left.update(&params, &origin);
        right.update(&params, &origin);
        for s in &profile.samples {
            let c = at(profile.derivatives(s.y));
            if s.y <= 0.0 {
                left.update(&params, &c);
            }
            if s.y >= 0.0 {
                right.update(&params, &c);
            }
        }
        (left, right)
    }

    /// `[m1, m2, m3, m4]` at modulus `r = |λ|`.
    pub fn m(&self, r: f64) -> [f64; 4] {
        [
            self.df2 / r,
            self.first_order / r.powf(1.5) + self.convective / r.sqrt(),
            self.second_order / r,
            self.third_order / r.sqrt(),
        ]
    }
}

/// `(θ1, θ2)`: arguments of `μ/2 ± i(1 − μ²/4)^{1/2}`.
pub fn reference_angles(mu: f64) -> (f64, f64) {
    let th = C::new(0.5 * mu, (1.0 - 0.25 * mu * mu).sqrt()).arg();
    (th, -th)
}

/// Reference roots `z1..z4` at direction `θ = arg λ`.
pub fn reference_roots(mu: f64, theta: f64) -> [C; 4] {
    let (t1, t2) = reference_angles(mu);
    let a = C::from_polar(1.0, 0.5 * (theta + t1));
    let b = C::from_polar(1.0, 0.5 * (theta + t2));
    [-a, -b, a, b]
}

/// Dichotomy rate: smallest `|Re z_k|` at direction `θ`.
pub fn dichotomy_rate(mu: f64, theta: f64) -> f64 {
    reference_roots(mu, theta)
        .iter()
        .map(|z| z.re.abs())
        .fold(f64::INFINITY, f64::min)
}

/// Triple products of root distances `g1..g4`.
pub fn root_gaps(z: &[C; 4]) -> [f64; 4] {
    let d = |i: usize, j: usize| (z[i] - z[j]).norm();
    [
        d(0, 1) * d(0, 2) * d(0, 3),
        d(0, 1) * d(1, 2) * d(1, 3),
        d(0, 2) * d(1, 2) * d(2, 3),
        d(0, 3) * d(1, 3) * d(2, 3),
    ]
}

/// Residual matrix `r_{jk} = p / g_j` with `p = Σ m_l`.
pub fn residual_matrix(m: &[f64; 4], g: &[f64; 4]) -> [[f64; 4]; 4] {
    let p: f64 = m.iter().sum();
    g.map(|gj| [p / gj; 4])
}

pub fn frobenius(r: &[[f64; 4]; 4]) -> f64 {
    r.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Both dichotomy conditions at one modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub modulus: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// `√2 √(ε₊² + ε₋²)`
    pub h_bound: f64,
    pub holds: bool,
}

struct Radius<'a> {
    left: &'a HalfLineSuprema,
    right: &'a HalfLineSuprema,
    g: [f64; 4],
    alpha: f64,
}

impl Radius<'_> {
    fn check(&self, r: f64) -> ConditionCheck {
        let dp = frobenius(&residual_matrix(&self.right.m(r), &self.g));
        let dm = frobenius(&residual_matrix(&self.left.m(r), &self.g));
        let (ep, em) = (4.0 * dp / self.alpha, 4.0 * dm / self.alpha);
        let h = 2f64.sqrt() * ep.hypot(em);
        ConditionCheck {
            modulus: r,
            delta_plus: dp,
            delta_minus: dm,
            eps_plus: ep,
            eps_minus: em,
            h_bound: h,
            holds: h < 1.0 && dp < 0.25 * self.alpha && dm < 0.25 * self.alpha,
        }
    }

    /// Smallest modulus in `[1, 1e8]` at which the conditions hold.
    fn solve(&self) -> Result<(f64, ConditionCheck, Option<ConditionCheck>)> {
        let (lo, hi) = (1.0f64, 1e8f64);
        let at_lo = self.check(lo);
        if at_lo.holds {
            return Ok((lo, at_lo, None));
        }
        if !self.check(hi).holds {
            return Err(Error::NoRadius { upper: hi });
        }
        let (mut a, mut b) = (lo.ln(), hi.ln());
        while b - a > 1e-13 {
            let m = 0.5 * (a + b);
            if self.check(m.exp()).holds {
                b = m;
            } else {
                a = m;
            }
        }
        let c = b.exp();
        Ok((c, self.check(c), Some(self.check(0.5 * c))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighFreqBoundReport {
    pub theta1: f64,
    pub theta2: f64,
    pub alpha: f64,
    /// Reference roots at `θ = 0`.
    pub z: [C; 4],
    pub g: [f64; 4],
    pub suprema_minus: HalfLineSuprema,
    pub suprema_plus: HalfLineSuprema,
    /// `p_k` at `|λ| = C` for the two half-lines.
    pub p_plus: f64,
    pub p_minus: f64,
    pub r_plus: [[f64; 4]; 4],
    pub r_minus: [[f64; 4]; 4],
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// Radius beyond which no eigenvalue with `Re λ ≥ 0` exists.
    #[serde(rename = "C")]
    pub c: f64,
    pub at_c: ConditionCheck,
    /// Conditions at `C/2` (absent when `C` is the lower bracket end).
    pub at_half: Option<ConditionCheck>,
}

fn check_regime(params: &ShockParams) -> Result<()> {
    if !(params.mu < 2.0) {
        return Err(Error::UnsupportedRegime(format!("high-frequency bound needs mu < 2, got {}", params.mu)));
    }
    if (params.k - 2f64.sqrt()).abs() > 1e-12 {
        return Err(Error::UnsupportedRegime(format!("high-frequency bound needs k = sqrt(2), got {}", params.k)));
    }
    Ok(())
}

/// High-frequency exclusion radius along `profile`, with the rate `α`
/// taken at the worst direction `θ = π/2`.
pub fn highfreq_radius(profile: &ProfileCurve) -> Result<HighFreqBoundReport> {
    let params = profile.params;
    check_regime(&params)?;
    let (theta1, theta2) = reference_angles(params.mu);
    let alpha = (0.5 * (FRAC_PI_2 + theta1)).cos();
    let z = reference_roots(params.mu, 0.0);
    let g = root_gaps(&z);
    let (left, right) = HalfLineSuprema::from_profile(profile);
    let solver = Radius {
        left: &left,
        right: &right,
        g,
        alpha,
    };
    let (c, at_c, at_half) = solver.solve()?;
    let (mp, mm) = (right.m(c), left.m(c));
    let r_plus = residual_matrix(&mp, &g);
    let r_minus = residual_matrix(&mm, &g);
    Ok(HighFreqBoundReport {
        theta1,
        theta2,
        alpha,
        z,
        g,
        suprema_minus: left,
        suprema_plus: right,
        p_plus: mp.iter().sum(),
        p_minus: mm.iter().sum(),
        r_plus,
        r_minus,
        delta_plus: at_c.delta_plus,
        delta_minus: at_c.delta_minus,
        eps_plus: at_c.eps_plus,
        eps_minus: at_c.eps_minus,
        c,
        at_c,
        at_half,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorRadius {
    pub theta: f64,
    pub alpha: f64,
    pub radius: f64,
}

/// Direction-dependent radii using `α(θ)` in place of its worst case.
pub fn highfreq_sweep(profile: &ProfileCurve, thetas: &[f64]) -> Result<Vec<SectorRadius>> {
    let params = profile.params;
    check_regime(&params)?;
    let g = root_gaps(&reference_roots(params.mu, 0.0));
    let (left, right) = HalfLineSuprema::from_profile(profile);
    thetas
        .iter()
        .map(|&theta| {
            let alpha = dichotomy_rate(params.mu, theta);
            let (radius, _, _) = Radius {
                left: &left,
                right: &right,
                g,
                alpha,
            }
            .solve()?;
            Ok(SectorRadius { theta, alpha, radius })
        })
        .collect()
}

/// Region `{margin ≤ Re λ ≤ energy bound, |λ| ≤ C}` that may hold unstable eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRegion {
    pub margin: f64,
    pub real_bound: f64,
    pub radius: f64,
    pub contour: Contour,
}

impl SearchRegion {
    pub fn new(margin: f64, real_bound: f64, radius: f64) -> Result<Self> {
        assert!(real_bound > 0.0, "energy bound is positive by construction");
        if !(margin >= 0.0) || margin >= real_bound.min(radius) {
            return Err(Error::InvalidParams(format!(
                "margin {margin} must lie below both the real-part bound {real_bound} and the radius {radius}"
            )));
        }
        let contour = if real_bound >= radius {
            Contour::half_disk(radius, margin)?
        } else {
            use crate::evans::Piece;
            let hb = (radius * radius - real_bound * real_bound).sqrt();
            let hm = (radius * radius - margin * margin).sqrt();
            let tb = hb.atan2(real_bound);
            let tm = hm.atan2(margin);
            Contour {
                pieces: vec![
                    Piece::Segment {
                        from: [real_bound, -hb],
                        to: [real_bound, hb],
                        cluster: 0.0,
                    },
                    Piece::Arc {
                        center: [0.0, 0.0],
                        radius,
                        theta0: tb,
                        theta1: tm,
                    },
                    Piece::Segment {
                        from: [margin, hm],
                        to: [margin, -hm],
                        cluster: if margin > 0.0 { (hm / margin).asinh() } else { 0.0 },
                    },
                    Piece::Arc {
                        center: [0.0, 0.0],
                        radius,
                        theta0: -tm,
                        theta1: -tb,
                    },
                ],
            }
        };
        Ok(Self {
            margin,
            real_bound,
            radius,
            contour,
        })
    }

    /// Same region with the radius capped.
    pub fn clipped(&self, radius: f64) -> Result<Self> {
        Self::new(self.margin, self.real_bound, self.radius.min(radius))
    }

    /// Area enclosed by the boundary (shoelace on a fine polygon).
    pub fn area(&self) -> f64 {
        let n = 4096;
        let pts: Vec<C> = self
            .contour
            .pieces
            .iter()
            .flat_map(|p| (0..n).map(move |i| p.point(i as f64 / n as f64)))
            .collect();
        let m = pts.len();
        0.5 * (0..m)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % m]);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
    }
}

pub fn combined_exclusion(
    energy: &EnergyBoundReport,
    high: &HighFreqBoundReport,
    margin: f64,
) -> Result<SearchRegion> {
    SearchRegion::new(margin, energy.bound, high.c)
}
