use log::warn;

use super::curve::{ProfileCurve, ProfileSample, Tail};
use super::{
    equilibrium_eigenvalues, equilibrium_jacobian, existence_certificate, reduced_unstable_vector,
    rhs, saddle_unstable_vector, Orientation,
};
use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeError, StepControl};
use crate::shock_states::{ShockParams, ROOT_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ShootOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Seed distance from the saddle, relative to `|P⁻ − P⁺|`.
    pub seed_offset: f64,
    /// Stopping distance from the attracting end, relative to `|P⁻ − P⁺|`.
    pub end_tol: f64,
    /// Span cap in units of the slowest equilibrium rate.
    pub span_factor: f64,
    /// Length of the linear tail sampled before the seed, in units of `1/λ_u`.
    pub upstream_span: f64,
    pub upstream_points: usize,
    /// Integrator step cap; defaults to a tenth of the fastest equilibrium time scale.
    pub max_step: Option<f64>,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            seed_offset: 1e-6,
            end_tol: 1e-6,
            span_factor: 50.0,
            upstream_span: 10.0,
            upstream_points: 40,
            max_step: None,
        }
    }
}

struct Rates {
    unstable: f64,
    node_slow: f64,
    fastest: f64,
}

fn rates(params: &ShockParams, o: &Orientation) -> Rates {
    let sad = equilibrium_eigenvalues(params, o.p_saddle, o.damping_speed);
    let node = equilibrium_eigenvalues(params, o.p_node, o.damping_speed);
    let fastest = sad
        .iter()
        .chain(node.iter())
        .map(|l| l.norm())
        .fold(0.0, f64::max);
    Rates {
        unstable: sad[0].re,
        node_slow: node[0].re.abs().min(node[1].re.abs()),
        fastest,
    }
}

/// Shoots along the saddle's unstable manifold towards the attracting end.
///
/// The returned curve is in the scenario's own frame, runs from `P⁻` to `P⁺`
/// in increasing `y` and is anchored at the half-density crossing.
pub fn shoot_heteroclinic(params: &ShockParams, opts: &ShootOptions) -> Result<ProfileCurve> {
    let o = Orientation::new(params)?;
    let cert = existence_certificate(params)?;
    if !cert.invariant_region_ok {
        warn!(
            "invariant-region test fails (max F1 = {:.6e}); shooting anyway",
            cert.max_f1
        );
    }
    let gap = o.p_saddle - o.p_node;
    let eta = opts.seed_offset * gap;
    let tol_end = opts.end_tol * gap;
    let r = rates(params, &o);
    let span = opts.span_factor / r.unstable.min(r.node_slow);
    let h_max = opts.max_step.unwrap_or(0.1 / r.fastest);

    let v = saddle_unstable_vector(params, o.p_saddle, o.damping_speed);
    let seed = [o.p_saddle + eta * v[0], eta * v[1]];

    // Linear part of the unstable manifold before the seed.
    let up_len = opts.upstream_span / r.unstable;
    let n_up = opts.upstream_points;
    let mut frame: Vec<ProfileSample> = (0..n_up)
        .map(|j| {
            let y = -up_len * (n_up - j) as f64 / n_up as f64;
            let c = eta * (r.unstable * y).exp();
            ProfileSample {
                y,
                p: o.p_saddle + c * v[0],
                q: c * v[1],
            }
        })
        .collect();
    let start = frame.len();
    frame.push(ProfileSample {
        y: 0.0,
        p: seed[0],
        q: seed[1],
    });

    let mut residual = f64::INFINITY;
    let mut vacuum: Option<(f64, f64)> = None;
    let mut escaped = false;
    let ds = o.damping_speed;
    let solver = Dopri5::new(opts.rtol, opts.atol).with_max_step(h_max);
    let out = solver.integrate(
        |_, y| {
            let (a, b) = rhs(params, y[0], y[1], ds, false);
            [a, b]
        },
        0.0,
        seed,
        span,
        |t, y| {
            frame.push(ProfileSample {
                y: t,
                p: y[0],
                q: y[1],
            });
            residual = (y[0] - o.p_node).hypot(y[1]);
            if y[0] <= ROOT_FLOOR {
                vacuum = Some((t, y[0]));
                return StepControl::Stop;
            }
            if y[0] > 1e3 * o.p_saddle.max(1.0) {
                escaped = true;
                return StepControl::Stop;
            }
            if residual < tol_end {
                StepControl::Stop
            } else {
                StepControl::Continue
            }
        },
    );
    match out {
        Ok(_) => {}
        Err(OdeError::NonFinite { t }) => return Err(Error::VacuumHit { y: t, p: f64::NAN }),
        Err(e) => return Err(Error::Integration(e.to_string())),
    }
    if let Some((y, p)) = vacuum {
        return Err(Error::VacuumHit { y, p });
    }
    if escaped || residual >= tol_end {
        return Err(Error::NoConvergence { residual, span });
    }
    let end = frame.len();

    // Tails in the oriented frame, then mapped to the scenario frame.
    let last = frame[end - 1];
    let node_dev = [last.p - o.p_node, last.q];
    let first = frame[0];
    let amplitude = (first.p - o.p_saddle) * v[0] + first.q * v[1];

    let (p_minus, p_plus) = o.minus_plus();
    let (samples, left, right, integrated) = if !o.reflected {
        let left = Tail::Mode {
            y0: first.y,
            p_eq: o.p_saddle,
            amplitude,
            rate: r.unstable,
            vector: v,
        };
        let right = Tail::Decay {
            y0: last.y,
            p_eq: o.p_node,
            dev0: node_dev,
            jacobian: equilibrium_jacobian(params, o.p_node, params.s),
        };
        (frame, left, right, (start, end))
    } else {
        let n = frame.len();
        let samples: Vec<ProfileSample> = frame
            .iter()
            .rev()
            .map(|s| ProfileSample {
                y: -s.y,
                p: s.p,
                q: -s.q,
            })
            .collect();
        let left = Tail::Decay {
            y0: -last.y,
            p_eq: o.p_node,
            dev0: [node_dev[0], -node_dev[1]],
            jacobian: equilibrium_jacobian(params, o.p_node, params.s),
        };
        let right = Tail::Mode {
            y0: -first.y,
            p_eq: o.p_saddle,
            amplitude,
            rate: -r.unstable,
            vector: [v[0], -v[1]],
        };
        (samples, left, right, (n - end, n - start))
    };
    let mut curve = ProfileCurve::assemble(
        *params,
        p_minus,
        p_plus,
        samples,
        left,
        right,
        integrated,
        o.reflected,
    );
    curve.anchor_at_mid_density();
    Ok(curve)
}

/// Follows the reduced (undamped) system from the saddle around the
/// homoclinic loop until the closest return to the saddle. Samples are in
/// the oriented frame, starting at the seed.
pub fn trace_homoclinic_loop(params: &ShockParams, opts: &ShootOptions) -> Result<Vec<ProfileSample>> {
    let o = Orientation::new(params)?;
    let gap = o.p_saddle - o.p_node;
    let eta = opts.seed_offset * gap;
    let v = reduced_unstable_vector(params, o.p_saddle);
    let seed = [o.p_saddle + eta * v[0], eta * v[1]];
    let r = rates(params, &o);
    let lam = (2.0 * params.df(o.p_saddle)).sqrt() / params.k;
    let span = 2.0 * opts.span_factor / lam.min(r.node_slow.max(1e-3));
    let h_max = opts.max_step.unwrap_or(0.1 / r.fastest);
    let mut samples = vec![ProfileSample {
        y: 0.0,
        p: seed[0],
        q: seed[1],
    }];
    let mut best = f64::INFINITY;
    let mut returning = false;
    Dopri5::new(opts.rtol, opts.atol)
        .with_max_step(h_max)
        .integrate(
            |_, y| {
                let (a, b) = rhs(params, y[0], y[1], 0.0, true);
                [a, b]
            },
            0.0,
            seed,
            span,
            |t, y| {
                samples.push(ProfileSample {
                    y: t,
                    p: y[0],
                    q: y[1],
                });
                if y[1] > 0.0 {
                    returning = true;
                }
                if returning {
                    let d = (y[0] - o.p_saddle).hypot(y[1]);
                    if d > best {
                        return StepControl::Stop;
                    }
                    best = d;
                }
                if y[0] <= ROOT_FLOOR {
                    return StepControl::Stop;
                }
                StepControl::Continue
            },
        )
        .map_err(|e| Error::Integration(e.to_string()))?;
    Ok(samples)
}
