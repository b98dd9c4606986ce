//! The planar profile equation in `(P, Q̃)` with `Q̃ = k²P′/2`:
//!
//! ```text
//! P′ = 2Q̃/k²
//! Q̃′ = f(P) − 2sμQ̃/k² + 2Q̃²/(k²P)
//! ```
//!
//! Equilibria sit at the roots of `f`. The larger root is a saddle, the
//! smaller one a stable node or focus once the orientation is fixed so that
//! the effective damping `|s|μ` is positive. For `s < 0` every test runs in
//! the reflected frame `ỹ = −y`, `η = −Q̃`, which is the same system with
//! `|s|` in the damping term.

mod curve;
mod shoot;

pub use curve::{ProfileCurve, ProfileSample, Tail};
pub use shoot::{shoot_heteroclinic, trace_homoclinic_loop, ShootOptions};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shock_states::{bisect, bracket_roots, ShockParams};

/// Right-hand side of the profile system; `reduced` drops the damping and
/// the `Q̃²/P` term, leaving the Hamiltonian part.
pub fn ode_rhs(params: &ShockParams, p: f64, q: f64) -> Result<(f64, f64)> {
    if !(p > 0.0) {
        return Err(Error::domain("density", p));
    }
    Ok(rhs(params, p, q, params.s, false))
}

pub fn reduced_rhs(params: &ShockParams, p: f64, q: f64) -> Result<(f64, f64)> {
    if !(p > 0.0) {
        return Err(Error::domain("density", p));
    }
    Ok(rhs(params, p, q, params.s, true))
}

/// `damping_speed` replaces `s` in the damping term only (`f` keeps the
/// scenario's `s`), which is how the reflected frame is expressed.
pub(crate) fn rhs(params: &ShockParams, p: f64, q: f64, damping_speed: f64, reduced: bool) -> (f64, f64) {
    let k2 = params.k * params.k;
    let dp = 2.0 * q / k2;
    let dq = if reduced {
        params.f(p)
    } else {
        params.f(p) - 2.0 * damping_speed * params.mu * q / k2 + 2.0 * q * q / (k2 * p)
    };
    (dp, dq)
}

/// Jacobian of the profile system at an equilibrium `(P, 0)`.
pub fn equilibrium_jacobian(params: &ShockParams, p: f64, damping_speed: f64) -> [[f64; 2]; 2] {
    let k2 = params.k * params.k;
    [[0.0, 2.0 / k2], [params.df(p), -2.0 * damping_speed * params.mu / k2]]
}

/// Hamiltonian `H(P, Q̃) = F(P) − Q̃²/k² − F(P_s)` of the reduced system,
/// normalised to vanish at the saddle `P_s`.
pub fn hamiltonian(params: &ShockParams, p: f64, q: f64, p_saddle: f64) -> f64 {
    params.primitive(p) - q * q / (params.k * params.k) - params.primitive(p_saddle)
}

/// Rate of change of `H` along the full system:
/// `(4Q̃²/k⁴)(sμ − Q̃/P)` with `s` the damping speed.
pub fn hamiltonian_rate(params: &ShockParams, p: f64, q: f64, damping_speed: f64) -> f64 {
    let k2 = params.k * params.k;
    4.0 * q * q / (k2 * k2) * (damping_speed * params.mu - q / p)
}

/// Roots of `f` arranged by role: the saddle (larger root) and the
/// attracting end (smaller root), plus the frame orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Orientation {
    pub p_saddle: f64,
    pub p_node: f64,
    pub p0: f64,
    /// `true` when `s < 0` and the tests run in `ỹ = −y`.
    pub reflected: bool,
    pub damping_speed: f64,
}

impl Orientation {
    pub fn new(params: &ShockParams) -> Result<Self> {
        if params.s == 0.0 {
            return Err(Error::Degenerate("s = 0: no travelling shock".into()));
        }
        let r = bracket_roots(params)?;
        Ok(Self {
            p_saddle: r.high,
            p_node: r.low,
            p0: r.p0,
            reflected: params.s < 0.0,
            damping_speed: params.s.abs(),
        })
    }

    /// `(P⁻, P⁺)` in the scenario's own frame.
    pub fn minus_plus(&self) -> (f64, f64) {
        if self.reflected {
            (self.p_node, self.p_saddle)
        } else {
            (self.p_saddle, self.p_node)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumKind {
    Saddle,
    StableNode,
    StableFocus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub p: f64,
    pub eigenvalues: [Complex64; 2],
    pub kind: EquilibriumKind,
}

/// Eigenvalues `(−sμ ± √(s²μ² + 2k²f′))/k²` of the equilibrium Jacobian,
/// larger real part first.
pub fn equilibrium_eigenvalues(params: &ShockParams, p: f64, damping_speed: f64) -> [Complex64; 2] {
    let k2 = params.k * params.k;
    let sm = damping_speed * params.mu;
    let disc = Complex64::new(sm * sm + 2.0 * k2 * params.df(p), 0.0).sqrt();
    [(-sm + disc) / k2, (-sm - disc) / k2]
}

/// Classifies the two equilibria, returned as `(P⁻ report, P⁺ report)`.
///
/// Kinds are those of the oriented frame: for `s < 0` the saddle is `P⁺`.
pub fn classify_equilibria(params: &ShockParams) -> Result<(EquilibriumReport, EquilibriumReport)> {
    let o = Orientation::new(params)?;
    let saddle = EquilibriumReport {
        p: o.p_saddle,
        eigenvalues: equilibrium_eigenvalues(params, o.p_saddle, o.damping_speed),
        kind: EquilibriumKind::Saddle,
    };
    let sm = o.damping_speed * params.mu;
    let node_kind = if 2.0 * params.k * params.k * params.df(o.p_node) + sm * sm >= 0.0 {
        EquilibriumKind::StableNode
    } else {
        EquilibriumKind::StableFocus
    };
    let node = EquilibriumReport {
        p: o.p_node,
        eigenvalues: equilibrium_eigenvalues(params, o.p_node, o.damping_speed),
        kind: node_kind,
    };
    Ok(if o.reflected { (node, saddle) } else { (saddle, node) })
}

/// Coefficients of the transcritical normal form `w′ = a h w + b w²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationCoefficients {
    pub a: f64,
    pub b: f64,
}

pub fn bifurcation_coefficients(params: &ShockParams, p_minus: f64) -> Result<BifurcationCoefficients> {
    if params.s == 0.0 {
        return Err(Error::Degenerate("s = 0 in the normal-form coefficients".into()));
    }
    if !(p_minus > 0.0) {
        return Err(Error::domain("p_minus", p_minus));
    }
    let g = params.gamma;
    let a = -g * (g + 1.0) * p_minus.powf(g - 2.0) / (2.0 * params.s * params.mu);
    Ok(BifurcationCoefficients { a, b: -a })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceCertificate {
    pub invariant_region_ok: bool,
    pub oscillatory: bool,
    pub divergence_sign_ok: bool,
    pub max_f1: f64,
    /// Where `F₁` attains its maximum on `(0, P_node]`.
    pub argmax_f1: f64,
}

const CERT_SLACK: f64 = 1e-12;

/// Unique zero of `F₁′ = f − 2(sμ/k)²P` on `(0, P_node)`; `F₁` is concave there.
pub fn restricted_energy_argmax(params: &ShockParams, o: &Orientation) -> f64 {
    let c = 2.0 * (params.s * params.mu / params.k).powi(2);
    let g = |p: f64| params.f(p) - c * p;
    let mut lo = o.p_node * 1e-3;
    while g(lo) <= 0.0 && lo > 1e-300 {
        lo *= 1e-3;
    }
    bisect(g, lo, o.p_node)
}

pub fn existence_certificate(params: &ShockParams) -> Result<ExistenceCertificate> {
    let o = Orientation::new(params)?;
    let argmax = restricted_energy_argmax(params, &o);
    let max_f1 = params.restricted_energy(argmax, o.p_saddle);
    let sm_k = o.damping_speed * params.mu / params.k;
    let oscillatory = sm_k < (-2.0 * params.df(o.p_node)).sqrt();
    Ok(ExistenceCertificate {
        invariant_region_ok: max_f1 <= CERT_SLACK,
        oscillatory,
        divergence_sign_ok: loop_below_line(params, &o),
        max_f1,
        argmax_f1: argmax,
    })
}

/// Left end `P*` of the homoclinic loop: the root of `F − F(P_s)` below `P_node`.
pub fn loop_left_end(params: &ShockParams, o: &Orientation) -> f64 {
    let fs = params.primitive(o.p_saddle);
    let g = |p: f64| params.primitive(p) - fs;
    let mut lo = o.p_node * 0.5;
    while g(lo) >= 0.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    bisect(g, lo, o.p_node)
}

/// Samples the upper branch `Q̃ = k√(F − F(P_s))` of the homoclinic loop and
/// checks that it stays below the line `Q̃ = sμP`, where the divergence of
/// the damped field keeps one sign.
fn loop_below_line(params: &ShockParams, o: &Orientation) -> bool {
    let left = loop_left_end(params, o);
    let fs = params.primitive(o.p_saddle);
    let n = 4096;
    (0..=n).all(|i| {
        let p = left + (o.p_saddle - left) * i as f64 / n as f64;
        let q = params.k * (params.primitive(p) - fs).max(0.0).sqrt();
        q <= o.damping_speed * params.mu * p + 1e-12 * (1.0 + q)
    })
}

/// Smallest viscosity for which the line `Q̃ = sμP` touches the homoclinic loop.
///
/// At tangency `F₁ = F₁′ = 0`, so the contact density solves
/// `P f(P) = 2(F(P) − F(P_s))` on `(P*, P_node)`, a strictly decreasing
/// function there. Errors when the result falls outside `bracket`.
pub fn min_viscosity_tangency(params: &ShockParams, bracket: (f64, f64)) -> Result<f64> {
    let o = Orientation::new(params)?;
    let left = loop_left_end(params, &o);
    let fs = params.primitive(o.p_saddle);
    let phi = |p: f64| p * params.f(p) - 2.0 * (params.primitive(p) - fs);
    let p_t = bisect(phi, left, o.p_node);
    let mu = params.k * (params.primitive(p_t) - fs).sqrt() / (o.damping_speed * p_t);
    if !(mu >= bracket.0 && mu <= bracket.1) {
        return Err(Error::Bracket(format!(
            "tangency viscosity {mu:.6e} outside [{:.3e}, {:.3e}]",
            bracket.0, bracket.1
        )));
    }
    Ok(mu)
}

/// Unstable eigenvector of the saddle, unit length, pointing into the loop
/// (first component negative in the oriented frame).
pub fn saddle_unstable_vector(params: &ShockParams, p_saddle: f64, damping_speed: f64) -> [f64; 2] {
    let k2 = params.k * params.k;
    let a = 2.0 / k2;
    let b = 2.0 * damping_speed * params.mu / k2;
    let fp = params.df(p_saddle);
    let v = [-(b + (b * b + 4.0 * a * fp).sqrt()) / (2.0 * fp), -1.0];
    normalise(v)
}

/// Unstable eigenvector of the saddle for the reduced system.
pub fn reduced_unstable_vector(params: &ShockParams, p_saddle: f64) -> [f64; 2] {
    let a = 2.0 / (params.k * params.k);
    normalise([-(a / params.df(p_saddle)).sqrt(), -1.0])
}

/// Unnormalised forms `v₂`, `ṽ₂` with second component `−1`.
pub fn seed_vectors_raw(params: &ShockParams) -> Result<([f64; 2], [f64; 2])> {
    let o = Orientation::new(params)?;
    let k2 = params.k * params.k;
    let a = 2.0 / k2;
    let b = 2.0 * o.damping_speed * params.mu / k2;
    let fp = params.df(o.p_saddle);
    Ok((
        [-(b + (b * b + 4.0 * a * fp).sqrt()) / (2.0 * fp), -1.0],
        [-(a / fp).sqrt(), -1.0],
    ))
}

fn normalise(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}
