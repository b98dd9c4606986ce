//! The eigenvalue problem in integrated variables `V = [ρ̂, Ĵ, ρ̂′, ρ̂″]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::essential_spectrum::StateCoefficients;
use crate::profile::ProfileCurve;
use crate::shock_states::ShockParams;

type C = Complex64;
pub type Mat4 = [[C; 4]; 4];

/// Coefficient functions of the linearisation at one ordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub p: f64,
    pub dp: f64,
    pub d2p: f64,
    /// `J²/P² − γP^{γ−1}`
    pub f1: f64,
    /// `s − 2J/P`
    pub f2: f64,
    pub df1: f64,
    pub df2: f64,
    /// Nonlinear-dispersion terms.
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
}

impl Coefficients {
    pub fn at(params: &ShockParams, d: [f64; 3]) -> Self {
        let [p, dp, d2p] = d;
        let (s, a, g, k2) = (params.s, params.a, params.gamma, params.k * params.k);
        let u = s - a / p; // J/P
        let r = dp / p;
        Self {
            p,
            dp,
            d2p,
            f1: u * u - g * p.powf(g - 1.0),
            f2: s - 2.0 * u,
            df1: 2.0 * u * a * dp / (p * p) - g * (g - 1.0) * p.powf(g - 2.0) * dp,
            df2: -2.0 * a * dp / (p * p),
            f3: k2 * (dp * d2p / (p * p) - r * r * r),
            f4: k2 * (1.5 * r * r - d2p / p),
            f5: -k2 * r,
        }
    }
}

/// Linearisation about a profile, with the two end-state limits.
#[derive(Debug, Clone)]
pub struct LinearizedSystem {
    pub profile: ProfileCurve,
    pub params: ShockParams,
    pub minus: StateCoefficients,
    pub plus: StateCoefficients,
}

impl LinearizedSystem {
    pub fn new(profile: ProfileCurve) -> Result<Self> {
        let params = profile.params;
        let s = params.s;
        let minus = StateCoefficients::new(profile.p_minus, s * profile.p_minus - params.a, s, params.gamma)?;
        let plus = StateCoefficients::new(profile.p_plus, s * profile.p_plus - params.a, s, params.gamma)?;
        Ok(Self {
            profile,
            params,
            minus,
            plus,
        })
    }

    /// The constant state `P ≡ p`, for which the Evans function is explicit.
    pub fn constant(params: ShockParams, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::domain("density", p));
        }
        Self::new(ProfileCurve::constant(params, p))
    }

    pub fn coefficients(&self, y: f64) -> Coefficients {
        Coefficients::at(&self.params, self.profile.derivatives(y))
    }

    /// `M̂(y, λ)`.
    pub fn matrix(&self, y: f64, lambda: C) -> Mat4 {
        let c = self.coefficients(y);
        let r = c.dp / c.p;
        let (s, mu, k2) = (self.params.s, self.params.mu, self.params.k * self.params.k);
        let z = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        [
            [z, z, one, z],
            [-lambda, z, C::new(s, 0.0), z],
            [z, z, z, one],
            [
                lambda * (2.0 * c.f2 / k2),
                lambda * (2.0 / k2),
                lambda * (2.0 * mu / k2) - (2.0 * c.f1 / k2 + 2.0 * s * c.f2 / k2 + r * r),
                C::new(2.0 * r - 2.0 * s * mu / k2, 0.0),
            ],
        ]
    }

    pub fn asymptotic_matrices(&self, lambda: C) -> (Mat4, Mat4) {
        (
            asymptotic_matrix(lambda, &self.minus, &self.params),
            asymptotic_matrix(lambda, &self.plus, &self.params),
        )
    }

    /// Coefficients `(a3, a2, a1, a0)` of the scalar fourth-order form
    /// `ρ̂⁗ + a3ρ̂‴ + a2ρ̂″ + a1ρ̂′ + a0ρ̂ = 0`, nonlinear dispersion included.
    pub fn scalar_form_coefficients(&self, y: f64, lambda: C) -> Result<[C; 4]> {
        if lambda.norm() == 0.0 {
            return Err(Error::Domain {
                what: "|lambda|",
                value: 0.0,
            });
        }
        Ok(scalar_coefficients(&self.params, &self.coefficients(y), lambda, true))
    }

    /// Same coefficients after `x = y/|λ|^{1/2}`, divided by `|λ|^{(4−j)/2}`.
    pub fn rescaled_coefficients(&self, y: f64, lambda: C) -> Result<[C; 4]> {
        let a = self.scalar_form_coefficients(y, lambda)?;
        let m = lambda.norm();
        Ok([a[0] / m.sqrt(), a[1] / m, a[2] / m.powf(1.5), a[3] / (m * m)])
    }
}

/// Scalar-form coefficients from coefficient values; `nonlinear = false`
/// drops `f3`, `f4`, `f5` (linear dispersion).
pub fn scalar_coefficients(params: &ShockParams, c: &Coefficients, lambda: C, nonlinear: bool) -> [C; 4] {
    let (s, mu, k2) = (params.s, params.mu, params.k * params.k);
    let w = if nonlinear { 1.0 } else { 0.0 };
    let g = 2.0 / k2;
    [
        C::new(g * (s * mu + w * c.f5), 0.0),
        (C::new(c.f1 + s * c.f2 + w * c.f4, 0.0) - lambda * mu) * g,
        (C::new(c.df1 + s * c.df2 + w * c.f3, 0.0) - lambda * (c.f2 + s)) * g,
        (lambda * lambda - lambda * c.df2) * g,
    ]
}

/// `M±` built from end-state coefficients.
pub fn asymptotic_matrix(lambda: C, co: &StateCoefficients, params: &ShockParams) -> Mat4 {
    let (s, mu, k2) = (params.s, params.mu, params.k * params.k);
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    [
        [z, z, one, z],
        [-lambda, z, C::new(s, 0.0), z],
        [z, z, z, one],
        [
            lambda * (2.0 * co.beta / k2),
            lambda * (2.0 / k2),
            (lambda * mu - s * co.beta - co.alpha) * (2.0 / k2),
            C::new(-2.0 * s * mu / k2, 0.0),
        ],
    ]
}

/// Eigenvector `[1, (sν − λ)/ν, ν, ν²]` of `M±` for the spatial root `ν`.
pub fn eigenvector(nu: C, lambda: C, s: f64) -> [C; 4] {
    [C::new(1.0, 0.0), (nu * s - lambda) / nu, nu, nu * nu]
}

/// Coefficients of `det(νI − M)` for a 4×4 matrix, by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &Mat4) -> [C; 4] {
    let mut coeffs = [C::new(0.0, 0.0); 4];
    let mut mk = *m; // M·B_{k−1}
    let mut c_prev;
    for k in 1..=4 {
        let tr: C = (0..4).map(|i| mk[i][i]).sum();
        c_prev = -tr / k as f64;
        coeffs[k - 1] = c_prev;
        if k == 4 {
            break;
        }
        // B_k = M B_{k−1} + c_k I, then M B_k.
        let mut b = mk;
        for (i, row) in b.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        mk = mat_mul(m, &b);
    }
    coeffs
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

pub fn det4(cols: &[[C; 4]; 4]) -> C {
    // Laplace expansion on 2×2 minors of the first two columns.
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let w = |a: &[C; 4], b: &[C; 4], i: usize, j: usize| a[i] * b[j] - a[j] * b[i];
    let left: Vec<C> = pairs.iter().map(|&(i, j)| w(&cols[0], &cols[1], i, j)).collect();
    let right: Vec<C> = pairs.iter().map(|&(i, j)| w(&cols[2], &cols[3], i, j)).collect();
    wedge_pair(&left.try_into().unwrap(), &right.try_into().unwrap())
}

/// `w ∧ u` for 2-vectors in the basis (12, 13, 14, 23, 24, 34).
pub fn wedge_pair(w: &[C; 6], u: &[C; 6]) -> C {
    w[0] * u[5] - w[1] * u[4] + w[2] * u[3] + w[3] * u[2] - w[4] * u[1] + w[5] * u[0]
}
