//! Evans-function evaluation at a single spectral parameter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quartic::QuarticRoots;
use super::system::{det4, eigenvector, wedge_pair, LinearizedSystem, Mat4};
use crate::error::{Error, Result};
use crate::essential_spectrum::{consistent_splitting, StateCoefficients};
use crate::ode::{Dopri5, OdeError, StepControl};
use crate::shock_states::ShockParams;

type C = Complex64;

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvansMethod {
    /// Orthonormalised two-column frame.
    #[default]
    Frame,
    /// Exterior-product (second compound) system in six dimensions.
    Compound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvansOptions {
    pub method: EvansMethod,
    pub rtol: f64,
    pub atol: f64,
    /// Multiplies both truncation lengths.
    pub l_scale: f64,
    /// Relative profile deviation below which the end state is reached.
    pub tail_tol: f64,
    /// Growth per accepted step treated as a blow-up.
    pub max_growth: f64,
}

impl Default for EvansOptions {
    fn default() -> Self {
        Self {
            method: EvansMethod::Frame,
            rtol: 1e-10,
            atol: 1e-12,
            l_scale: 1.0,
            tail_tol: 1e-16,
            max_growth: 1e12,
        }
    }
}

/// `E(λ) = mantissa · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvansValue {
    pub lambda: C,
    pub mantissa: C,
    pub log_scale: f64,
    pub roots_minus: QuarticRoots,
    pub roots_plus: QuarticRoots,
    /// Truncation points `(−L⁻, L⁺)`.
    pub span: (f64, f64),
}

impl EvansValue {
    pub fn value(&self) -> C {
        self.mantissa * self.log_scale.exp()
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }
}

fn unit(v: [C; 4]) -> [C; 4] {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / n)
}

/// The two roots of one half-plane together with unit eigenvectors.
struct Pair {
    nu: [C; 2],
    vecs: [[C; 4]; 2],
}

impl Pair {
    fn mean(&self) -> C {
        (self.nu[0] + self.nu[1]) * 0.5
    }

    fn gap(&self) -> C {
        self.nu[1] - self.nu[0]
    }
}

fn pairs_for(lambda: C, co: &StateCoefficients, params: &ShockParams) -> Result<(Pair, Pair, QuarticRoots)> {
    let sp = consistent_splitting(lambda, co, params)?;
    if sp.n_unstable != 2 {
        return Err(Error::InconsistentSplitting {
            lambda,
            unstable: sp.n_unstable,
            stable: sp.n_stable,
        });
    }
    // Roots are sorted by real part: two stable first.
    let r = sp.roots.roots;
    let make = |a: C, b: C| Pair {
        nu: [a, b],
        vecs: [unit(eigenvector(a, lambda, params.s)), unit(eigenvector(b, lambda, params.s))],
    };
    Ok((make(r[0], r[1]), make(r[2], r[3]), sp.roots))
}

/// Evans function of the constant state described by `co`, computed in
/// closed form from the eigenvectors of its (constant) matrix.
pub fn constant_state_evans(lambda: C, co: &StateCoefficients, params: &ShockParams) -> Result<C> {
    let (stable, unstable, _) = pairs_for(lambda, co, params)?;
    let d = det4(&[unstable.vecs[0], unstable.vecs[1], stable.vecs[0], stable.vecs[1]]);
    Ok(d / (unstable.gap() * stable.gap()))
}

/// Truncation lengths `(L⁻, L⁺)`: beyond them the profile equals its end
/// states to `tail_tol` relative accuracy.
pub fn truncation_lengths(sys: &LinearizedSystem, opts: &EvansOptions) -> (f64, f64) {
    let prof = &sys.profile;
    let (lo, hi) = prof.y_range();
    let reach = |y: f64, p_eq: f64, rate: f64| {
        let d = prof.derivatives(y);
        let dev = ((d[0] - p_eq).abs() + d[1].abs() + d[2].abs()) / p_eq;
        if dev <= opts.tail_tol || rate <= 0.0 {
            0.0
        } else {
            (dev / opts.tail_tol).ln() / rate
        }
    };
    let left = lo - reach(lo, prof.p_minus, prof.left_tail.decay_rate());
    let right = hi + reach(hi, prof.p_plus, prof.right_tail.decay_rate());
    (
        opts.l_scale * (-left).max(1.0),
        opts.l_scale * right.max(1.0),
    )
}

fn ode_error(e: OdeError) -> Error {
    Error::Integration(e.to_string())
}

fn mat_vec(m: &Mat4, v: &[C; 4], shift: C) -> [C; 4] {
    let mut out = [C::new(0.0, 0.0); 4];
    for i in 0..4 {
        out[i] = (0..4).map(|j| m[i][j] * v[j]).sum::<C>() - shift * v[i];
    }
    out
}

fn pack<const N: usize>(z: &[C]) -> [f64; N] {
    let mut out = [0.0; N];
    for (i, c) in z.iter().enumerate() {
        out[2 * i] = c.re;
        out[2 * i + 1] = c.im;
    }
    out
}

fn unpack(y: &[f64]) -> Vec<C> {
    y.chunks(2).map(|c| C::new(c[0], c[1])).collect()
}

/// Complex Gram–Schmidt on two columns; returns `ln(r11 r22)`.
fn orthonormalise(cols: &mut [[C; 4]; 2]) -> f64 {
    let n0 = cols[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    cols[0] = cols[0].map(|z| z / n0);
    let proj: C = (0..4).map(|i| cols[0][i].conj() * cols[1][i]).sum();
    for i in 0..4 {
        cols[1][i] -= proj * cols[0][i];
    }
    let n1 = cols[1].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    cols[1] = cols[1].map(|z| z / n1);
    (n0 * n1).ln()
}

fn wedge(a: &[C; 4], b: &[C; 4]) -> [C; 6] {
    PAIRS.map(|(i, j)| a[i] * b[j] - a[j] * b[i])
}

/// Transports the span of `pair` from `y0` to 0; returns the final
/// 2-vector (unit norm) and the accumulated log scale.
fn transport(
    sys: &LinearizedSystem,
    lambda: C,
    pair: &Pair,
    y0: f64,
    opts: &EvansOptions,
) -> Result<([C; 6], f64)> {
    let shift = pair.mean();
    let solver = Dopri5::new(opts.rtol, opts.atol);
    let mut blowup = None;
    match opts.method {
        EvansMethod::Frame => {
            let mut cols = pair.vecs;
            let mut log = orthonormalise(&mut cols);
            let y_init: [f64; 16] = pack(&[cols[0], cols[1]].concat());
            let rhs = |y: f64, st: &[f64; 16]| {
                let z = unpack(st);
                let m = sys.matrix(y, lambda);
                let a = mat_vec(&m, &[z[0], z[1], z[2], z[3]], shift);
                let b = mat_vec(&m, &[z[4], z[5], z[6], z[7]], shift);
                pack(&[a, b].concat())
            };
            let out = solver
                .integrate(rhs, y0, y_init, 0.0, |_, st| {
                    let z = unpack(st);
                    let mut c = [[z[0], z[1], z[2], z[3]], [z[4], z[5], z[6], z[7]]];
                    let g = orthonormalise(&mut c);
                    if !g.is_finite() || g > opts.max_growth.ln() {
                        blowup = Some(g.exp());
                        return StepControl::Stop;
                    }
                    log += g;
                    *st = pack(&[c[0], c[1]].concat());
                    StepControl::Modified
                })
                .map_err(ode_error)?;
            if let Some(growth) = blowup {
                return Err(Error::IntegrationBlowup { lambda, growth });
            }
            let z = unpack(&out.y);
            Ok((wedge(&[z[0], z[1], z[2], z[3]], &[z[4], z[5], z[6], z[7]]), log))
        }
        EvansMethod::Compound => {
            let w0 = wedge(&pair.vecs[0], &pair.vecs[1]);
            let n0 = norm6(&w0);
            let mut log = n0.ln();
            let y_init: [f64; 12] = pack(&w0.map(|z| z / n0));
            let rhs = |y: f64, st: &[f64; 12]| {
                let w = unpack(st);
                let m = sys.matrix(y, lambda);
                let get = |a: usize, b: usize| -> C {
                    match a.cmp(&b) {
                        std::cmp::Ordering::Equal => C::new(0.0, 0.0),
                        std::cmp::Ordering::Less => w[pair_index(a, b)],
                        std::cmp::Ordering::Greater => -w[pair_index(b, a)],
                    }
                };
                let mut d = [C::new(0.0, 0.0); 6];
                for (n, &(i, j)) in PAIRS.iter().enumerate() {
                    let mut acc = -shift * 2.0 * w[n];
                    for l in 0..4 {
                        acc += m[i][l] * get(l, j) + m[j][l] * get(i, l);
                    }
                    d[n] = acc;
                }
                pack(&d)
            };
            let out = solver
                .integrate(rhs, y0, y_init, 0.0, |_, st| {
                    let w = unpack(st);
                    let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if !n.is_finite() || n > opts.max_growth {
                        blowup = Some(n);
                        return StepControl::Stop;
                    }
                    log += n.ln();
                    *st = pack(&w.iter().map(|z| z / n).collect::<Vec<_>>());
                    StepControl::Modified
                })
                .map_err(ode_error)?;
            if let Some(growth) = blowup {
                return Err(Error::IntegrationBlowup { lambda, growth });
            }
            let w = unpack(&out.y);
            Ok((w.try_into().unwrap(), log))
        }
    }
}

fn norm6(w: &[C; 6]) -> f64 {
    w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn pair_index(a: usize, b: usize) -> usize {
    PAIRS.iter().position(|&p| p == (a, b)).unwrap()
}

/// Evaluates the Evans function at `lambda`.
///
/// The unstable pair of `M⁻` is carried forward from `−L⁻`, the stable pair
/// of `M⁺` backward from `L⁺`, both with the mean exponential rate of the
/// pair removed. The determinant at `y = 0` is divided by the root gaps
/// `(ν₂⁻ − ν₁⁻)(ν₂⁺ − ν₁⁺)` so the value does not depend on root order.
pub fn evans_function(sys: &LinearizedSystem, lambda: C, opts: &EvansOptions) -> Result<EvansValue> {
    let (_, unstable, roots_minus) = pairs_for(lambda, &sys.minus, &sys.params)?;
    let (stable, _, roots_plus) = pairs_for(lambda, &sys.plus, &sys.params)?;
    let (l_minus, l_plus) = truncation_lengths(sys, opts);
    let (w_minus, log_minus) = transport(sys, lambda, &unstable, -l_minus, opts)?;
    let (w_plus, log_plus) = transport(sys, lambda, &stable, l_plus, opts)?;
    let det = wedge_pair(&w_minus, &w_plus);
    Ok(EvansValue {
        lambda,
        mantissa: det / (unstable.gap() * stable.gap()),
        log_scale: log_minus + log_plus,
        roots_minus,
        roots_plus,
        span: (-l_minus, l_plus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{shoot_heteroclinic, ShootOptions};

    fn nonmonotone() -> ShockParams {
        ShockParams::new(1.5, 1.0, 2f64.sqrt(), 1.0, 1.0, 1.1).unwrap()
    }

    fn constant_system() -> LinearizedSystem {
        let p = nonmonotone();
        let (_, hi) = crate::shock_states::flux_roots(&p).unwrap();
        LinearizedSystem::constant(p, hi).unwrap()
    }

    #[test]
    fn constant_state_matches_closed_form() {
        let sys = constant_system();
        let k2 = sys.params.k * sys.params.k;
        for lam in [C::new(1.0, 0.0), C::new(0.3, 4.0), C::new(7.0, -2.0), C::new(1e-3, 10.0)] {
            let exact = constant_state_evans(lam, &sys.minus, &sys.params).unwrap();
            for method in [EvansMethod::Frame, EvansMethod::Compound] {
                let opts = EvansOptions {
                    method,
                    ..Default::default()
                };
                let e = evans_function(&sys, lam, &opts).unwrap().value();
                assert!((e - exact).norm() < 1e-8 * exact.norm(), "{lam} {method:?}: {e} vs {exact}");
            }
            // Root-product form: (k²/2λ) Π(stable − unstable) / Π|v|.
            let r = sys.minus;
            let roots = crate::essential_spectrum::spatial_roots(lam, &r, &sys.params).roots;
            let norm = |nu: C| unit_norm(eigenvector(nu, lam, sys.params.s));
            let mut prod = C::new(k2, 0.0) / (lam * 2.0);
            for s in &roots[..2] {
                for u in &roots[2..] {
                    prod *= s - u;
                }
            }
            for z in roots {
                prod /= norm(z);
            }
            assert!((prod - exact).norm() < 1e-10 * exact.norm());
        }
    }

    fn unit_norm(v: [C; 4]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn methods_agree_on_profile() {
        let prof = shoot_heteroclinic(&nonmonotone(), &ShootOptions::default()).unwrap();
        let sys = LinearizedSystem::new(prof).unwrap();
        for lam in [C::new(0.5, 0.5), C::new(2.0, -3.0), C::new(10.0, 0.0)] {
            let a = evans_function(&sys, lam, &EvansOptions::default()).unwrap();
            let b = evans_function(
                &sys,
                lam,
                &EvansOptions {
                    method: EvansMethod::Compound,
                    ..Default::default()
                },
            )
            .unwrap();
            let (ea, eb) = (a.value(), b.value());
            assert!((ea - eb).norm() < 1e-6 * ea.norm(), "{lam}: {ea} {eb}");
        }
    }

    #[test]
    fn doubling_truncation_is_harmless() {
        let prof = shoot_heteroclinic(&nonmonotone(), &ShootOptions::default()).unwrap();
        let sys = LinearizedSystem::new(prof).unwrap();
        let lam = C::new(1.0, 2.0);
        let a = evans_function(&sys, lam, &EvansOptions::default()).unwrap().value();
        let b = evans_function(
            &sys,
            lam,
            &EvansOptions {
                l_scale: 2.0,
                ..Default::default()
            },
        )
        .unwrap()
        .value();
        assert!((a - b).norm() < 1e-6 * a.norm());
    }

    #[test]
    fn conjugate_symmetry() {
        let prof = shoot_heteroclinic(&nonmonotone(), &ShootOptions::default()).unwrap();
        let sys = LinearizedSystem::new(prof).unwrap();
        let lam = C::new(0.8, 1.7);
        let a = evans_function(&sys, lam, &EvansOptions::default()).unwrap().value();
        let b = evans_function(&sys, lam.conj(), &EvansOptions::default()).unwrap().value();
        assert!((a.conj() - b).norm() < 1e-7 * a.norm());
    }

    #[test]
    fn splitting_failure_is_reported() {
        let sys = constant_system();
        // λ = 0 gives a zero spatial root.
        let e = evans_function(&sys, C::new(0.0, 0.0), &EvansOptions::default());
        assert!(matches!(e, Err(Error::SplittingAmbiguous { .. })), "{e:?}");
    }
}
