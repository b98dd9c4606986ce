//! Euler shock algebra behind the profile equation.
//!
//! The profile nonlinearity is
//! `f(P) = P^γ − (A s + B) + A²/P`, whose two positive roots are the end
//! densities of a shock with speed `s`. `F` is its antiderivative and
//! `F₁` is the Hamiltonian restricted to the line `Q̃ = sμP`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Lower end of the root bracket below the interior minimum of `f`.
pub const ROOT_FLOOR: f64 = 1e-12;

const RH_TOL: f64 = 1e-10;

/// Physical and model parameters of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockParams {
    pub gamma: f64,
    pub mu: f64,
    pub k: f64,
    pub s: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl ShockParams {
    pub fn new(gamma: f64, mu: f64, k: f64, s: f64, a: f64, b: f64) -> Result<Self> {
        let all = [gamma, mu, k, s, a, b];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if gamma < 1.0 {
            return Err(Error::InvalidParams(format!("gamma must be >= 1, got {gamma}")));
        }
        if mu <= 0.0 {
            return Err(Error::domain("mu", mu));
        }
        if k <= 0.0 {
            return Err(Error::domain("k", k));
        }
        Ok(Self {
            gamma,
            mu,
            k,
            s,
            a,
            b,
        })
    }

    /// Builds parameters whose flux constants reproduce the given end states.
    pub fn from_end_states(states: &EndStates, mu: f64, k: f64) -> Result<Self> {
        Self::new(
            states.gamma,
            mu,
            k,
            states.s,
            states.flux_constant(),
            states.bernoulli_constant(),
        )
    }

    /// Same scenario with a different viscosity.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.gamma, mu, self.k, self.s, self.a, self.b)
    }

    fn c(&self) -> f64 {
        self.a * self.s + self.b
    }

    /// `f(P)`; the caller guarantees `p > 0`.
    pub fn f(&self, p: f64) -> f64 {
        p.powf(self.gamma) - self.c() + self.a * self.a / p
    }

    pub fn df(&self, p: f64) -> f64 {
        self.gamma * p.powf(self.gamma - 1.0) - self.a * self.a / (p * p)
    }

    pub fn d2f(&self, p: f64) -> f64 {
        self.gamma * (self.gamma - 1.0) * p.powf(self.gamma - 2.0)
            + 2.0 * self.a * self.a / (p * p * p)
    }

    /// `F(P) = P^{γ+1}/(γ+1) − (As+B)P + A² ln P`.
    pub fn primitive(&self, p: f64) -> f64 {
        p.powf(self.gamma + 1.0) / (self.gamma + 1.0) - self.c() * p + self.a * self.a * p.ln()
    }

    /// `F₁(P) = F(P) − (sμP/k)² − F(P_ref)`, with `P_ref` the saddle state.
    pub fn restricted_energy(&self, p: f64, p_ref: f64) -> f64 {
        let line = self.s * self.mu * p / self.k;
        self.primitive(p) - line * line - self.primitive(p_ref)
    }

    /// Unique critical point `P₀ = (A²/γ)^{1/(γ+1)}` of `f`.
    pub fn critical_density(&self) -> f64 {
        (self.a * self.a / self.gamma).powf(1.0 / (self.gamma + 1.0))
    }
}

/// The scalar functions of the profile equation, evaluated with a domain check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFn {
    F,
    DF,
    D2F,
    Primitive,
    /// `F₁` with the reference state taken from the scenario orientation.
    Restricted,
}

impl ScalarFn {
    pub fn eval(self, params: &ShockParams, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::domain("density", p));
        }
        Ok(match self {
            ScalarFn::F => params.f(p),
            ScalarFn::DF => params.df(p),
            ScalarFn::D2F => params.d2f(p),
            ScalarFn::Primitive => params.primitive(p),
            ScalarFn::Restricted => {
                let (_, p_minus) = flux_roots(params)?;
                params.restricted_energy(p, p_minus)
            }
        })
    }
}

pub fn sound_speed(rho: f64, gamma: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain("density", rho));
    }
    Ok((gamma * rho.powf(gamma - 1.0)).sqrt())
}

/// The two positive roots of `f`, unoriented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxRoots {
    pub low: f64,
    pub high: f64,
    pub p0: f64,
}

/// Locates both roots of `f` by bracketing around `P₀`, bisection and two
/// Newton polishing steps.
pub fn bracket_roots(params: &ShockParams) -> Result<FluxRoots> {
    if params.a == 0.0 {
        // f is then monotone: at most one root.
        return Err(Error::NoShockWindow {
            f_min: -params.c(),
        });
    }
    let p0 = params.critical_density();
    let f0 = params.f(p0);
    if !(f0 < 0.0) {
        return Err(Error::NoShockWindow { f_min: f0 });
    }

    let mut lo = ROOT_FLOOR.min(0.5 * p0);
    while params.f(lo) <= 0.0 {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::NoShockWindow { f_min: f0 });
        }
    }
    let mut hi = 2.0 * p0;
    while params.f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoShockWindow { f_min: f0 });
        }
    }
    let low = polish(params, bisect(|p| params.f(p), lo, p0));
    let high = polish(params, bisect(|p| params.f(p), p0, hi));
    Ok(FluxRoots { low, high, p0 })
}

/// End densities `(P⁺, P⁻)` oriented by the sign of `s`: for `s ≥ 0` the
/// flow runs from the larger root down to the smaller one.
pub fn flux_roots(params: &ShockParams) -> Result<(f64, f64)> {
    let r = bracket_roots(params)?;
    if params.s >= 0.0 {
        Ok((r.low, r.high))
    } else {
        Ok((r.high, r.low))
    }
}

/// Bisection on a sign change, shrinking to 1e-14 relative width.
pub(crate) fn bisect<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= 1e-14 * m.abs().max(f64::MIN_POSITIVE) || m == a || m == b {
            return m;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn polish(params: &ShockParams, mut p: f64) -> f64 {
    for _ in 0..2 {
        let d = params.df(p);
        if d != 0.0 {
            let next = p - params.f(p) / d;
            if next > 0.0 && next.is_finite() {
                p = next;
            }
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShockFamily {
    Lax1,
    Lax2,
    NonLax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SonicClass {
    Subsonic,
    Sonic,
    Supersonic,
}

/// Characteristic speeds and classification of a pair of end states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub family: ShockFamily,
    pub sonic_left: SonicClass,
    pub sonic_right: SonicClass,
    /// `[λ₁(U⁻), λ₂(U⁻), λ₁(U⁺), λ₂(U⁺)]`
    pub char_speeds: [f64; 4],
}

/// End states of a shock with Rankine–Hugoniot consistency and classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndStates {
    pub p_minus: f64,
    pub j_minus: f64,
    pub p_plus: f64,
    pub j_plus: f64,
    pub s: f64,
    pub gamma: f64,
    pub family: ShockFamily,
    pub sonic_class_left: SonicClass,
    pub sonic_class_right: SonicClass,
}

impl EndStates {
    /// Builds end states from raw values, classifying them.
    pub fn new(p_minus: f64, j_minus: f64, p_plus: f64, j_plus: f64, s: f64, gamma: f64) -> Result<Self> {
        if !(p_minus > 0.0) {
            return Err(Error::domain("p_minus", p_minus));
        }
        if !(p_plus > 0.0) {
            return Err(Error::domain("p_plus", p_plus));
        }
        let c = lax_classify(p_minus, j_minus, p_plus, j_plus, s, gamma)?;
        Ok(Self {
            p_minus,
            j_minus,
            p_plus,
            j_plus,
            s,
            gamma,
            family: c.family,
            sonic_class_left: c.sonic_left,
            sonic_class_right: c.sonic_right,
        })
    }

    /// End states of the scenario: densities from the roots of `f`,
    /// momenta from `J = sP − A`.
    pub fn from_params(params: &ShockParams) -> Result<Self> {
        let (p_plus, p_minus) = flux_roots(params)?;
        Self::new(
            p_minus,
            params.s * p_minus - params.a,
            p_plus,
            params.s * p_plus - params.a,
            params.s,
            params.gamma,
        )
    }

    pub fn u_minus(&self) -> f64 {
        self.j_minus / self.p_minus
    }

    pub fn u_plus(&self) -> f64 {
        self.j_plus / self.p_plus
    }

    /// `A = sP⁻ − J⁻`.
    pub fn flux_constant(&self) -> f64 {
        self.s * self.p_minus - self.j_minus
    }

    /// `B = −sJ⁻ + (J⁻)²/P⁻ + (P⁻)^γ`.
    pub fn bernoulli_constant(&self) -> f64 {
        -self.s * self.j_minus
            + self.j_minus * self.j_minus / self.p_minus
            + self.p_minus.powf(self.gamma)
    }

    /// Residuals of the two Rankine–Hugoniot relations.
    pub fn rankine_hugoniot_residuals(&self) -> (f64, f64) {
        let mass = (self.j_plus - self.j_minus) - self.s * (self.p_plus - self.p_minus);
        let flux = |p: f64, j: f64| j * j / p + p.powf(self.gamma);
        let momentum = (flux(self.p_plus, self.j_plus) - flux(self.p_minus, self.j_minus))
            - self.s * (self.j_plus - self.j_minus);
        (mass, momentum)
    }

    pub fn satisfies_rankine_hugoniot(&self) -> bool {
        let (r1, r2) = self.rankine_hugoniot_residuals();
        let scale = 1.0 + self.p_minus.powf(self.gamma).max(self.p_plus.powf(self.gamma));
        r1.abs() < RH_TOL * scale && r2.abs() < RH_TOL * scale
    }

    /// Hypothesis of the small-shock existence result: a 2-shock whose
    /// right state has `u⁺ > c_s(P⁺)`, or a 1-shock with a subsonic left state.
    pub fn small_shock_hypothesis(&self) -> bool {
        let c_plus = (self.gamma * self.p_plus.powf(self.gamma - 1.0)).sqrt();
        match self.family {
            ShockFamily::Lax2 => self.u_plus() > c_plus,
            ShockFamily::Lax1 => self.sonic_class_left == SonicClass::Subsonic,
            ShockFamily::NonLax => false,
        }
    }
}

/// Both branches `A₁ < 0 < A₂` of the end-state quadratic for given densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBranches {
    pub a1: f64,
    pub a2: f64,
    pub branch1: EndStates,
    pub branch2: EndStates,
}

impl DensityBranches {
    /// The first branch that is a Lax shock, if any.
    pub fn lax_branch(&self) -> Option<(usize, &EndStates)> {
        [(1, &self.branch1), (2, &self.branch2)]
            .into_iter()
            .find(|(_, b)| b.family != ShockFamily::NonLax)
    }
}

pub fn end_states_from_densities(p_minus: f64, p_plus: f64, s: f64, gamma: f64) -> Result<DensityBranches> {
    if !(p_minus > 0.0) {
        return Err(Error::domain("p_minus", p_minus));
    }
    if !(p_plus > 0.0) {
        return Err(Error::domain("p_plus", p_plus));
    }
    if gamma < 1.0 || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("gamma must be >= 1, got {gamma}")));
    }
    if p_minus == p_plus {
        return Err(Error::Degenerate("p_minus == p_plus: no shock".into()));
    }
    let ratio = (p_plus.powf(gamma) - p_minus.powf(gamma)) / (p_plus - p_minus);
    let magnitude = (p_plus * p_minus).sqrt() * ratio.sqrt();
    let build = |a: f64| EndStates::new(p_minus, s * p_minus - a, p_plus, s * p_plus - a, s, gamma);
    Ok(DensityBranches {
        a1: -magnitude,
        a2: magnitude,
        branch1: build(-magnitude)?,
        branch2: build(magnitude)?,
    })
}

fn sonic_class(u: f64, c: f64) -> SonicClass {
    let gap = u.abs() - c;
    if gap.abs() <= 1e-12 * c.max(1.0) {
        SonicClass::Sonic
    } else if gap < 0.0 {
        SonicClass::Subsonic
    } else {
        SonicClass::Supersonic
    }
}

/// Lax entropy test `λ_k(U⁺) < s < λ_k(U⁻)` for `k = 1, 2` plus sonic type.
pub fn lax_classify(
    p_minus: f64,
    j_minus: f64,
    p_plus: f64,
    j_plus: f64,
    s: f64,
    gamma: f64,
) -> Result<Classification> {
    let c_minus = sound_speed(p_minus, gamma)?;
    let c_plus = sound_speed(p_plus, gamma)?;
    let u_minus = j_minus / p_minus;
    let u_plus = j_plus / p_plus;
    let speeds = [
        u_minus - c_minus,
        u_minus + c_minus,
        u_plus - c_plus,
        u_plus + c_plus,
    ];
    let same = p_minus == p_plus && j_minus == j_plus;
    let family = if same {
        ShockFamily::NonLax
    } else if speeds[2] < s && s < speeds[0] {
        ShockFamily::Lax1
    } else if speeds[3] < s && s < speeds[1] {
        ShockFamily::Lax2
    } else {
        ShockFamily::NonLax
    };
    Ok(Classification {
        family,
        sonic_left: sonic_class(u_minus, c_minus),
        sonic_right: sonic_class(u_plus, c_plus),
        char_speeds: speeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn focus_case() -> ShockParams {
        ShockParams::new(1.0, 0.25, 2f64.sqrt(), 1.0, 1.0, 7.3).unwrap()
    }

    fn nonmonotone() -> ShockParams {
        ShockParams::new(1.5, 1.0, 2f64.sqrt(), 1.0, 1.0, 1.1).unwrap()
    }

    #[test]
    fn sound_speed_examples() {
        assert_eq!(sound_speed(1.0, 2.0).unwrap(), 2f64.sqrt());
        assert_eq!(sound_speed(4.0, 1.0).unwrap(), 1.0);
        assert!((sound_speed(0.519, 1.5).unwrap() - 1.039_531_057_381_006).abs() < 1e-12);
        assert!(matches!(sound_speed(0.0, 1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn quadratic_oracle_for_gamma_one() {
        let p = focus_case();
        let disc = (8.3f64 * 8.3 - 4.0).sqrt();
        let (hi, lo) = ((8.3 + disc) / 2.0, (8.3 - disc) / 2.0);
        let (p_plus, p_minus) = flux_roots(&p).unwrap();
        assert!((p_minus - hi).abs() / hi < 1e-12);
        assert!((p_plus - lo).abs() / lo < 1e-12);
        assert!((p_minus - 8.177_716_474_629_266).abs() < 1e-10);
        assert!((p_plus - 0.122_283_525_370_734_24).abs() < 1e-12);
    }

    #[test]
    fn bisection_oracle_for_three_halves() {
        let p = nonmonotone();
        let p0 = (1.0f64 / 1.5).powf(1.0 / 2.5);
        let g = |x: f64| x.powf(1.5) - 2.1 + 1.0 / x;
        // Independent plain bisection on each side of P₀.
        let plain = |mut a: f64, mut b: f64| {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if (g(m) > 0.0) == (g(a) > 0.0) {
                    a = m
                } else {
                    b = m
                }
            }
            0.5 * (a + b)
        };
        let lo = plain(1e-9, p0);
        let hi = plain(p0, 10.0);
        let (p_plus, p_minus) = flux_roots(&p).unwrap();
        assert!((p_plus - lo).abs() < 1e-13);
        assert!((p_minus - hi).abs() < 1e-13);
        assert!((lo - 0.620_770_571_147_890_3).abs() < 1e-13);
        assert!((hi - 1.146_699_045_036_700_1).abs() < 1e-13);
        // For γ ≠ 1 the product identity does not hold; the roots are checked directly.
        assert!((p_plus * p_minus - 1.0).abs() > 1e-3);
        let scale = 2.1;
        assert!(p.f(p_plus).abs() < 1e-12 * scale);
        assert!(p.f(p_minus).abs() < 1e-12 * scale);
    }

    #[test]
    fn no_window_below_minimum() {
        let p = nonmonotone();
        let p0 = p.critical_density();
        // Minimum of P^γ + A²/P − As at P₀.
        let min_b = p0.powf(1.5) + 1.0 / p0 - 1.0;
        let below = ShockParams::new(1.5, 1.0, 2f64.sqrt(), 1.0, 1.0, min_b - 1e-3).unwrap();
        assert!(matches!(flux_roots(&below), Err(Error::NoShockWindow { .. })));
        let zero_a = ShockParams::new(1.5, 1.0, 2f64.sqrt(), 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(flux_roots(&zero_a), Err(Error::NoShockWindow { .. })));
    }

    #[test]
    fn negative_speed_flips_orientation() {
        let p = ShockParams::new(1.0, 0.25, 2f64.sqrt(), -1.0, 1.0, 9.3).unwrap();
        let (p_plus, p_minus) = flux_roots(&p).unwrap();
        assert!(p_minus < p_plus);
    }

    #[test]
    fn restricted_energy_at_saddle() {
        let p = focus_case();
        let (_, p_minus) = flux_roots(&p).unwrap();
        let line = p.s * p.mu * p_minus / p.k;
        let v = ScalarFn::Restricted.eval(&p, p_minus).unwrap();
        assert!((v + line * line).abs() < 1e-12);
    }

    #[test]
    fn primitive_derivative_is_f() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for params in [focus_case(), nonmonotone()] {
            for _ in 0..10 {
                let x: f64 = rng.random_range(0.05..5.0);
                let h = 1e-6;
                let fd = (params.primitive(x + h) - params.primitive(x - h)) / (2.0 * h);
                let exact = params.f(x);
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
            }
        }
    }

    #[test]
    fn gamma_one_tangent_polynomial_roots() {
        // Roots of P(f(P) − 2(sμ/k)²P) for γ = 1 in closed form.
        let p = focus_case();
        let c = p.a * p.s + p.b;
        let k2 = p.k * p.k;
        let d2 = k2 - 2.0 * p.s * p.s * p.mu * p.mu;
        let disc = c * c * k2 * k2 - 4.0 * p.a * p.a * k2 * d2;
        for sign in [-1.0, 1.0] {
            let r = (c * k2 + sign * disc.sqrt()) / (2.0 * d2);
            let g = r * (p.f(r) - 2.0 * (p.s * p.mu / p.k).powi(2) * r);
            assert!(g.abs() < 1e-10, "{g}");
        }
    }

    #[test]
    fn branches_recover_flux_constant() {
        let p = focus_case();
        let (p_plus, p_minus) = flux_roots(&p).unwrap();
        let br = end_states_from_densities(p_minus, p_plus, 1.0, 1.0).unwrap();
        assert!((br.a2 - 1.0).abs() < 1e-10);
        assert!((br.a1 + 1.0).abs() < 1e-10);
        assert!((br.branch2.bernoulli_constant() - 7.3).abs() < 1e-9);
        let swapped = end_states_from_densities(p_plus, p_minus, 1.0, 1.0).unwrap();
        assert_eq!(swapped.a1, br.a1);
        assert_eq!(swapped.a2, br.a2);
        assert!(matches!(
            end_states_from_densities(1.0, 1.0, 1.0, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn focus_case_is_lax_two() {
        let states = EndStates::from_params(&focus_case()).unwrap();
        assert_eq!(states.family, ShockFamily::Lax2);
        assert!(states.satisfies_rankine_hugoniot());
        let states = EndStates::from_params(&nonmonotone()).unwrap();
        assert_eq!(states.family, ShockFamily::Lax2);
        // |u⁺| ≈ 0.611 against c_s(P⁺) ≈ 1.087.
        assert_eq!(states.sonic_class_right, SonicClass::Subsonic);
        assert!(!states.small_shock_hypothesis());
    }

    #[test]
    fn lax_two_with_slow_right_state_fails_hypothesis() {
        // Lax-2 shock whose right state has u⁺ ≤ c_s(P⁺).
        let gamma = 1.4;
        let (p_minus, p_plus) = (2.0, 1.0);
        let s = 1.5;
        let br = end_states_from_densities(p_minus, p_plus, s, gamma).unwrap();
        let lax2: Vec<_> = [br.branch1, br.branch2]
            .into_iter()
            .filter(|b| b.family == ShockFamily::Lax2)
            .collect();
        assert!(!lax2.is_empty());
        for b in lax2 {
            let c_plus = sound_speed(b.p_plus, gamma).unwrap();
            assert!(b.u_plus() <= c_plus);
            assert!(!b.small_shock_hypothesis());
        }
    }

    #[test]
    fn equal_states_are_not_lax() {
        let c = lax_classify(1.0, 0.3, 1.0, 0.3, 0.5, 1.4).unwrap();
        assert_eq!(c.family, ShockFamily::NonLax);
    }

    proptest! {
        #[test]
        fn f_is_convex(gamma in 1.0f64..3.0, a in -3.0f64..3.0, b in -2.0f64..5.0, s in -2.0f64..2.0, x in 1e-3f64..20.0) {
            let p = ShockParams::new(gamma, 1.0, 1.0, s, a, b).unwrap();
            prop_assume!(a != 0.0);
            prop_assert!(p.d2f(x) > 0.0);
        }

        #[test]
        fn vieta_for_gamma_one(a in 0.2f64..3.0, b in 0.5f64..10.0, s in 0.1f64..2.0) {
            let p = ShockParams::new(1.0, 1.0, 1.0, s, a, b).unwrap();
            if let Ok(r) = bracket_roots(&p) {
                prop_assert!((r.low * r.high - a * a).abs() < 1e-9 * a * a);
                prop_assert!((r.low + r.high - (a * s + b)).abs() < 1e-9 * (a * s + b).abs());
                prop_assert!(r.low < r.p0 && r.p0 < r.high);
            }
        }

        #[test]
        fn densities_round_trip(p_minus in 0.1f64..10.0, ratio in 0.05f64..0.95, s in -2.0f64..2.0, gamma in 1.0f64..3.0) {
            let p_plus = p_minus * ratio;
            let br = end_states_from_densities(p_minus, p_plus, s, gamma).unwrap();
            for (a, st) in [(br.a1, br.branch1), (br.a2, br.branch2)] {
                prop_assert!(st.satisfies_rankine_hugoniot());
                prop_assert!((st.flux_constant() - a).abs() <= 1e-10 * a.abs().max(1.0));
                let a_plus = s * st.p_plus - st.j_plus;
                prop_assert!((a_plus - a).abs() <= 1e-10 * a.abs().max(1.0));
                // f built from (A, B) vanishes at both densities.
                let params = ShockParams::from_end_states(&st, 1.0, 1.0).unwrap();
                let fs = params.f(p_minus).abs().max(params.f(p_plus).abs());
                let scale = p_minus.powf(gamma) + params.a * params.a / p_plus + (params.a * s + params.b).abs();
                prop_assert!(fs < 1e-10 * scale);
            }
        }

        #[test]
        fn lax_two_forces_decreasing_density(p1 in 0.1f64..10.0, p2 in 0.1f64..10.0, s in -3.0f64..3.0, gamma in 1.0f64..3.0) {
            prop_assume!((p1 - p2).abs() > 1e-6);
            let br = end_states_from_densities(p1, p2, s, gamma).unwrap();
            for st in [br.branch1, br.branch2] {
                if st.family == ShockFamily::Lax2 {
                    prop_assert!(st.p_plus < st.p_minus);
                    if st.small_shock_hypothesis() {
                        prop_assert!(st.s > 0.0);
                    }
                }
                if st.family == ShockFamily::Lax1 {
                    prop_assert!(st.p_plus > st.p_minus);
                    if st.small_shock_hypothesis() {
                        prop_assert!(st.s < 0.0);
                    }
                }
            }
        }
    }
}
