//! Essential-spectrum boundary at the end states.
//!
//! Freezing the coefficients at a constant state `(P, J)` and inserting a
//! Fourier mode `e^{iξx}` gives the dispersion relation
//!
//! ```text
//! λ² + (μξ² − i(s+β)ξ)λ + k²ξ⁴/2 − (α + sβ)ξ² − i sμξ³ = 0
//! ```
//!
//! with `α = J²/P² − γP^{γ−1}` and `β = s − 2J/P`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evans::quartic::{solve_quartic, QuarticRoots};
use crate::shock_states::{EndStates, ShockParams};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl StateCoefficients {
    pub fn new(p: f64, j: f64, s: f64, gamma: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::domain("density", p));
        }
        Ok(Self {
            alpha: j * j / (p * p) - gamma * p.powf(gamma - 1.0),
            beta: s - 2.0 * j / p,
        })
    }

    /// `(minus, plus)` coefficients.
    pub fn from_end_states(states: &EndStates) -> (Self, Self) {
        let make = |p: f64, j: f64| Self {
            alpha: j * j / (p * p) - states.gamma * p.powf(states.gamma - 1.0),
            beta: states.s - 2.0 * j / p,
        };
        (
            make(states.p_minus, states.j_minus),
            make(states.p_plus, states.j_plus),
        )
    }

    pub fn is_subsonic(&self) -> bool {
        self.alpha < 0.0
    }
}

/// Coefficients `(b, c)` of `λ² + bλ + c` at frequency `ξ`.
fn dispersion_coefficients(xi: f64, co: &StateCoefficients, params: &ShockParams) -> (C, C) {
    let (s, mu, k) = (params.s, params.mu, params.k);
    let b = C::new(mu * xi * xi, -(s + co.beta) * xi);
    let c = C::new(
        0.5 * k * k * xi.powi(4) - (co.alpha + s * co.beta) * xi * xi,
        -s * mu * xi.powi(3),
    );
    (b, c)
}

/// `p + iq`, the discriminant of the dispersion relation.
fn discriminant(xi: f64, co: &StateCoefficients, params: &ShockParams) -> (f64, f64) {
    let (s, mu, k) = (params.s, params.mu, params.k);
    let (a, b) = (co.alpha, co.beta);
    let x2 = xi * xi;
    let x4 = x2 * x2;
    let p = -s * s * x2 + 4.0 * a * x2 + 2.0 * s * b * x2 - b * b * x2 - 2.0 * k * k * x4 + mu * mu * x4;
    let q = 2.0 * s * mu * x2 * xi - 2.0 * b * mu * x2 * xi;
    (p, q)
}

/// The two roots `½(−μξ² + i(s+β)ξ ± √(p+iq))`, principal square root first.
pub fn dispersion_roots(xi: f64, co: &StateCoefficients, params: &ShockParams) -> (C, C) {
    let (p, q) = discriminant(xi, co, params);
    let centre = C::new(-params.mu * xi * xi, (params.s + co.beta) * xi);
    let root = C::new(p, q).sqrt();
    ((centre + root) / 2.0, (centre - root) / 2.0)
}

/// Relative residual of `λ` in the dispersion relation.
pub fn dispersion_residual(xi: f64, lambda: C, co: &StateCoefficients, params: &ShockParams) -> f64 {
    let (b, c) = dispersion_coefficients(xi, co, params);
    let r = lambda * lambda + b * lambda + c;
    let scale = lambda.norm_sqr() + b.norm() * lambda.norm() + c.norm();
    if scale == 0.0 {
        r.norm()
    } else {
        r.norm() / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCurve {
    pub xi: Vec<f64>,
    pub lambda1: Vec<C>,
    pub lambda2: Vec<C>,
    /// Every sampled value has `Re λ ≤ 0` (up to rounding).
    pub stable: bool,
}

/// `n` equispaced frequencies on `[−ξ_max, ξ_max]`; `n = 1` gives `[0]`.
pub fn xi_grid(xi_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -xi_max + 2.0 * xi_max * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Frequency range that covers the region where `B(ξ)` can change sign.
pub fn default_xi_max(co: &StateCoefficients, params: &ShockParams) -> f64 {
    10.0 * (co.alpha.abs().sqrt() / params.k).max(1.0)
}

/// Samples both boundary branches, tracking `±√D` continuously outward from
/// the frequency closest to zero.
pub fn spectral_curve(co: &StateCoefficients, params: &ShockParams, grid: &[f64]) -> SpectralCurve {
    let n = grid.len();
    let mut l1 = vec![C::new(0.0, 0.0); n];
    let mut l2 = vec![C::new(0.0, 0.0); n];
    if n > 0 {
        let start = (0..n)
            .min_by(|&a, &b| grid[a].abs().total_cmp(&grid[b].abs()))
            .unwrap();
        let (a, b) = dispersion_roots(grid[start], co, params);
        l1[start] = a;
        l2[start] = b;
        let mut track = |range: &mut dyn Iterator<Item = usize>, mut prev: C| {
            for i in range {
                let (a, b) = dispersion_roots(grid[i], co, params);
                let (x, y) = if (a - prev).norm() <= (b - prev).norm() {
                    (a, b)
                } else {
                    (b, a)
                };
                l1[i] = x;
                l2[i] = y;
                prev = x;
            }
        };
        track(&mut (start + 1..n), a);
        track(&mut (0..start).rev(), a);
    }
    let tol = |l: &C| 1e-12 * (1.0 + l.norm());
    let stable = l1.iter().chain(l2.iter()).all(|l| l.re <= tol(l));
    SpectralCurve {
        xi: grid.to_vec(),
        lambda1: l1,
        lambda2: l2,
        stable,
    }
}

/// `A(ξ)` and `B(ξ) = A² − p² − q²`; both non-negative exactly when the two
/// roots at `ξ` lie in the closed left half-plane.
pub fn stability_quantities(xi: f64, co: &StateCoefficients, params: &ShockParams) -> (f64, f64, f64) {
    let (s, mu, k) = (params.s, params.mu, params.k);
    let x2 = xi * xi;
    let a = x2 * (s - co.beta).powi(2) - 4.0 * co.alpha * x2 + (2.0 * k * k + mu * mu) * x2 * x2;
    let (p, q) = discriminant(xi, co, params);
    let b = a * a - p * p - q * q;
    // Rounding floor of the cancellation in B.
    let floor = 64.0 * f64::EPSILON * (a * a + p * p + q * q);
    (a, b, floor)
}

/// Closed form `B/(8μ²) = −2αξ⁶ + k²ξ⁸`.
pub fn stability_identity(xi: f64, co: &StateCoefficients, params: &ShockParams) -> f64 {
    -2.0 * co.alpha * xi.powi(6) + params.k * params.k * xi.powi(8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Frequency with the most negative of `A`, `B` (the first grid point if none is negative).
    pub worst_xi: f64,
    pub worst_value: f64,
    /// The closed form for `B` holds to 1e-8 relative on every grid point.
    pub identity_ok: bool,
    pub max_identity_error: f64,
    /// `α = 0`: the boundary touches the imaginary axis away from the origin.
    pub sonic: bool,
}

pub fn stability_test(co: &StateCoefficients, params: &ShockParams, grid: &[f64]) -> StabilityVerdict {
    let mut stable = true;
    let mut worst_xi = grid.first().copied().unwrap_or(0.0);
    let mut worst_value = f64::INFINITY;
    let mut identity_ok = true;
    let mut max_err = 0.0f64;
    let m8 = 8.0 * params.mu * params.mu;
    for &xi in grid {
        let (a, b, floor) = stability_quantities(xi, co, params);
        let a_floor = 64.0 * f64::EPSILON * a.abs().max(xi * xi);
        let ok = a >= -a_floor && b >= -floor;
        let v = a.min(b);
        if v < worst_value {
            worst_value = v;
            worst_xi = xi;
        }
        stable &= ok;
        let id = stability_identity(xi, co, params);
        let err = (b / m8 - id).abs();
        let scale = id.abs().max(floor / m8);
        let rel = if scale == 0.0 { err } else { err / scale };
        max_err = max_err.max(rel);
        if err > 1e-8 * id.abs() + floor / m8 {
            identity_ok = false;
        }
    }
    StabilityVerdict {
        stable,
        worst_xi,
        worst_value,
        identity_ok,
        max_identity_error: max_err,
        sonic: co.alpha == 0.0,
    }
}

/// Coefficients `[c3, c2, c1, c0]` of the spatial characteristic quartic
/// `ν⁴ + (2sμ/k²)ν³ + (2/k²)(α + sβ − λμ)ν² − (2(s+β)λ/k²)ν + 2λ²/k²`.
pub fn characteristic_coefficients(lambda: C, co: &StateCoefficients, params: &ShockParams) -> [C; 4] {
    let (s, mu, k2) = (params.s, params.mu, params.k * params.k);
    [
        C::new(2.0 * s * mu / k2, 0.0),
        (C::new(co.alpha + s * co.beta, 0.0) - lambda * mu) * (2.0 / k2),
        -lambda * (2.0 * (s + co.beta) / k2),
        lambda * lambda * (2.0 / k2),
    ]
}

pub fn spatial_roots(lambda: C, co: &StateCoefficients, params: &ShockParams) -> QuarticRoots {
    let c = characteristic_coefficients(lambda, co, params);
    solve_quartic(c[0], c[1], c[2], c[3])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Splitting {
    pub n_unstable: usize,
    pub n_stable: usize,
    /// `μ² = 2k²`: the balance excluded from the large-`|λ|` argument.
    pub degenerate_balance: bool,
    pub roots: QuarticRoots,
}

pub const SPLITTING_TOL: f64 = 1e-10;

/// Counts spatial roots by the sign of their real part.
pub fn consistent_splitting(lambda: C, co: &StateCoefficients, params: &ShockParams) -> Result<Splitting> {
    let roots = spatial_roots(lambda, co, params);
    let mut n_unstable = 0;
    let mut n_stable = 0;
    for z in roots.roots {
        if z.re.abs() < SPLITTING_TOL {
            return Err(Error::SplittingAmbiguous { lambda, re: z.re });
        }
        if z.re > 0.0 {
            n_unstable += 1;
        } else {
            n_stable += 1;
        }
    }
    let (m2, k2) = (params.mu * params.mu, 2.0 * params.k * params.k);
    Ok(Splitting {
        n_unstable,
        n_stable,
        degenerate_balance: (m2 - k2).abs() <= 1e-12 * m2.max(k2),
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evans::quartic::eval_quartic;
    use proptest::prelude::*;

    fn subsonic_state() -> (ShockParams, StateCoefficients) {
        let p = ShockParams::new(1.5, 0.1, 0.5, 1.0, 1.0, 1.3).unwrap();
        (p, StateCoefficients::new(0.519, -0.418, 1.0, 1.5).unwrap())
    }

    #[test]
    fn subsonic_state_alpha() {
        let (_, co) = subsonic_state();
        assert!((co.alpha + 0.431_963_728_752_880_56).abs() < 1e-14);
        assert!(co.is_subsonic());
    }

    #[test]
    fn zero_frequency_gives_zero() {
        let (p, co) = subsonic_state();
        let (a, b) = dispersion_roots(0.0, &co, &p);
        assert_eq!(a.norm(), 0.0);
        assert_eq!(b.norm(), 0.0);
        let c = spectral_curve(&co, &p, &xi_grid(1.0, 1));
        assert_eq!(c.xi, vec![0.0]);
        assert_eq!(c.lambda1[0].norm(), 0.0);
    }

    #[test]
    fn subsonic_state_curve_is_stable() {
        let (p, co) = subsonic_state();
        let grid = xi_grid(10.0, 2001);
        let c = spectral_curve(&co, &p, &grid);
        assert!(c.stable);
        for i in 0..grid.len() {
            for l in [c.lambda1[i], c.lambda2[i]] {
                assert!(l.re <= 0.0 || l.re.abs() < 1e-14);
                assert!(dispersion_residual(grid[i], l, &co, &p) < 1e-10);
            }
        }
        // Conjugate pairing on the symmetric grid.
        let n = grid.len();
        for i in 0..n {
            let j = n - 1 - i;
            let mut a = [c.lambda1[i], c.lambda2[i]];
            let mut b = [c.lambda1[j].conj(), c.lambda2[j].conj()];
            a.sort_by(|x, y| x.re.total_cmp(&y.re));
            b.sort_by(|x, y| x.re.total_cmp(&y.re));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-10 * (1.0 + x.norm()));
            }
        }
        let v = stability_test(&co, &p, &grid);
        assert!(v.stable && v.identity_ok);
    }

    #[test]
    fn branch_tracking_is_continuous() {
        let (p, co) = subsonic_state();
        let grid = xi_grid(10.0, 2001);
        let c = spectral_curve(&co, &p, &grid);
        let jump = c
            .lambda1
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .fold(0.0, f64::max);
        // Step 0.01 in ξ; derivative of λ is O(μξ + k ξ) here.
        assert!(jump < 0.2, "{jump}");
    }

    #[test]
    fn large_frequency_signs() {
        let (p, co) = subsonic_state();
        let xi = 1e3;
        let (a, b, _) = stability_quantities(xi, &co, &p);
        assert!(a > 0.0 && b > 0.0);
        let (l1, l2) = dispersion_roots(xi, &co, &p);
        assert!(l1.re <= 0.0 && l2.re <= 0.0);
    }

    #[test]
    fn supersonic_state_is_detected() {
        let p = ShockParams::new(1.5, 0.1, 0.5, 1.0, 1.0, 1.3).unwrap();
        let co = StateCoefficients {
            alpha: 0.3,
            beta: 0.2,
        };
        let v = stability_test(&co, &p, &xi_grid(default_xi_max(&co, &p), 2001));
        assert!(!v.stable);
        // The identity puts the sign change at ξ² = 2α/k².
        assert!(v.worst_xi.abs() < (2.0 * co.alpha).sqrt() / p.k);
        assert!(v.identity_ok);
        let c = spectral_curve(&co, &p, &xi_grid(1.0, 201));
        assert!(!c.stable);
    }

    #[test]
    fn splitting_at_large_real_lambda() {
        let (p, co) = subsonic_state();
        let s = consistent_splitting(C::new(1e3, 0.0), &co, &p).unwrap();
        assert_eq!((s.n_unstable, s.n_stable), (2, 2));
        assert!(s.roots.roots.iter().all(|z| z.im.abs() > 1e-3));
        assert!(!s.degenerate_balance);

        let heavy = ShockParams::new(1.5, 2.0, 0.5, 1.0, 1.0, 1.3).unwrap();
        let s = consistent_splitting(C::new(1e3, 0.0), &co, &heavy).unwrap();
        assert_eq!((s.n_unstable, s.n_stable), (2, 2));
        let re: Vec<f64> = s.roots.roots.iter().map(|z| z.re).collect();
        assert!(s.roots.roots.iter().all(|z| z.im.abs() < 1e-9 * z.norm()));
        assert!(re.windows(2).all(|w| w[1] - w[0] > 1e-3));

        let balanced = ShockParams::new(1.5, (2.0f64 * 0.25).sqrt(), 0.5, 1.0, 1.0, 1.3).unwrap();
        let s = consistent_splitting(C::new(1e3, 0.0), &co, &balanced).unwrap();
        assert!(s.degenerate_balance);
    }

    #[test]
    fn splitting_on_imaginary_axis_is_ambiguous() {
        let (p, co) = subsonic_state();
        // λ on the boundary curve has a purely imaginary spatial root ν = iξ.
        let (l1, _) = dispersion_roots(1.3, &co, &p);
        assert!(matches!(
            consistent_splitting(l1, &co, &p),
            Err(Error::SplittingAmbiguous { .. })
        ));
    }

    #[test]
    fn characteristic_roots_residual_and_symmetry() {
        let (p, co) = subsonic_state();
        for lam in [C::new(0.3, 2.0), C::new(5.0, -40.0), C::new(1e3, 1.0)] {
            let c = characteristic_coefficients(lam, &co, &p);
            let r = spatial_roots(lam, &co, &p);
            for z in r.roots {
                assert!(eval_quartic(&c, z).norm() < 1e-10 * lam.norm_sqr().max(1.0));
            }
            let rc = spatial_roots(lam.conj(), &co, &p);
            for z in r.roots {
                assert!(rc.roots.iter().any(|w| (w - z.conj()).norm() < 1e-9 * (1.0 + z.norm())));
            }
        }
        // λ = 0: ν = 0 is a double root.
        let c = characteristic_coefficients(C::new(0.0, 0.0), &co, &p);
        assert_eq!(c[2].norm() + c[3].norm(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn subsonic_states_are_stable(
            gamma in 1.0f64..3.0, pr in 0.1f64..5.0, mach in -0.99f64..0.99,
            s in -2.0f64..2.0, mu in 0.05f64..3.0, k in 0.1f64..3.0,
        ) {
            let c_s = (gamma * pr.powf(gamma - 1.0)).sqrt();
            let j = mach * c_s * pr;
            let co = StateCoefficients::new(pr, j, s, gamma).unwrap();
            prop_assert!(co.alpha <= 0.0);
            let params = ShockParams::new(gamma, mu, k, s, 1.0, 1.0).unwrap();
            let grid = xi_grid(default_xi_max(&co, &params), 2001);
            let v = stability_test(&co, &params, &grid);
            prop_assert!(v.stable);
            prop_assert!(v.identity_ok);
        }
    }
}
