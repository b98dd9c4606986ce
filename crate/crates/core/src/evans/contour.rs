//! Closed contours and winding numbers of the Evans function.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::eval::{evans_function, EvansOptions, EvansValue};
use super::system::LinearizedSystem;
use crate::error::{Error, Result};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Piece {
    /// `center + radius·e^{iθ}` for θ from `theta0` to `theta1`.
    Arc {
        center: [f64; 2],
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
    /// Straight segment; `cluster > 0` concentrates the parametrisation
    /// near the midpoint via `sinh(c(2t − 1))/sinh(c)`.
    Segment {
        from: [f64; 2],
        to: [f64; 2],
        #[serde(default)]
        cluster: f64,
    },
}

impl Piece {
    pub fn point(&self, t: f64) -> C {
        match *self {
            Piece::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => C::new(center[0], center[1]) + C::from_polar(radius, theta0 + t * (theta1 - theta0)),
            Piece::Segment { from, to, cluster } => {
                let u = if cluster > 0.0 {
                    0.5 + 0.5 * (cluster * (2.0 * t - 1.0)).sinh() / cluster.sinh()
                } else {
                    t
                };
                let a = C::new(from[0], from[1]);
                a + (C::new(to[0], to[1]) - a) * u
            }
        }
    }

    fn reversed(&self) -> Piece {
        match *self {
            Piece::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => Piece::Arc {
                center,
                radius,
                theta0: theta1,
                theta1: theta0,
            },
            Piece::Segment { from, to, cluster } => Piece::Segment {
                from: to,
                to: from,
                cluster,
            },
        }
    }
}

/// A closed curve made of consecutive pieces; each piece ends where the next begins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contour {
    pub pieces: Vec<Piece>,
}

impl Contour {
    /// Boundary of `{Re λ ≥ margin, |λ| ≤ radius}`, counter-clockwise.
    ///
    /// Samples on the vertical side are graded towards the real axis, where
    /// two spatial roots approach each other like `λ`.
    pub fn half_disk(radius: f64, margin: f64) -> Result<Self> {
        if !(radius > 0.0) || !(margin >= 0.0) || margin >= radius {
            return Err(Error::InvalidParams(format!(
                "contour needs 0 <= margin < radius, got margin {margin}, radius {radius}"
            )));
        }
        let th = (margin / radius).acos();
        let h = radius * th.sin();
        Ok(Self {
            pieces: vec![
                Piece::Arc {
                    center: [0.0, 0.0],
                    radius,
                    theta0: -th,
                    theta1: th,
                },
                Piece::Segment {
                    from: [margin, h],
                    to: [margin, -h],
                    cluster: if margin > 0.0 { (h / margin).asinh() } else { 0.0 },
                },
            ],
        })
    }

    /// Circle of `radius` about `center`, counter-clockwise.
    pub fn circle(center: C, radius: f64) -> Self {
        Self {
            pieces: vec![Piece::Arc {
                center: [center.re, center.im],
                radius,
                theta0: 0.0,
                theta1: 2.0 * PI,
            }],
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct WindingOptions {
    /// Initial uniform samples per piece.
    pub samples_per_piece: usize,
    pub max_depth: usize,
    /// Largest accepted phase step between neighbours.
    pub max_phase_step: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            samples_per_piece: 64,
            max_depth: 12,
            max_phase_step: FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSample {
    pub piece: usize,
    pub t: f64,
    pub depth: usize,
    pub value: EvansValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvansContourResult {
    pub contour: Contour,
    pub samples: Vec<ContourSample>,
    pub winding: i64,
    /// Total phase change divided by 2π before rounding.
    pub turns: f64,
    pub max_depth_used: usize,
}

impl EvansContourResult {
    /// Phase increments between consecutive samples, closing the loop.
    pub fn phase_steps(&self) -> Vec<f64> {
        let n = self.samples.len();
        (0..n)
            .map(|i| phase_step(&self.samples[i].value, &self.samples[(i + 1) % n].value))
            .collect()
    }
}

fn phase_step(a: &EvansValue, b: &EvansValue) -> f64 {
    (b.mantissa / a.mantissa).arg()
}

/// Spatial roots moved by more than half their previous minimal spacing.
fn roots_jump(a: &EvansValue, b: &EvansValue) -> bool {
    [(a.roots_minus, b.roots_minus), (a.roots_plus, b.roots_plus)]
        .into_iter()
        .any(|(p, mut q)| q.continue_from(&p) > 0.5 * p.min_separation())
}

fn needs_refinement(a: &EvansValue, b: &EvansValue, max_step: f64) -> bool {
    phase_step(a, b).abs() >= max_step || roots_jump(a, b)
}

/// Winding number of `E` along `contour`, with adaptive bisection of any
/// interval whose phase step reaches `max_phase_step` or across which the
/// spatial roots jump.
pub fn winding_number(
    sys: &LinearizedSystem,
    contour: &Contour,
    evans: &EvansOptions,
    opts: &WindingOptions,
) -> Result<EvansContourResult> {
    let n0 = opts.samples_per_piece.max(2);
    // Knots (piece, t, depth); the end of each piece is the start of the next.
    let mut knots: Vec<(usize, f64, usize)> = Vec::new();
    for p in 0..contour.pieces.len() {
        for i in 0..n0 {
            knots.push((p, i as f64 / n0 as f64, 0));
        }
    }
    let eval = |&(p, t, _): &(usize, f64, usize)| evans_function(sys, contour.pieces[p].point(t), evans);
    let mut values: Vec<EvansValue> = knots.par_iter().map(eval).collect::<Result<_>>()?;

    loop {
        let n = knots.len();
        let mut inserts: Vec<(usize, (usize, f64, usize))> = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            if !needs_refinement(&values[i], &values[j], opts.max_phase_step) {
                continue;
            }
            let (p, t, d) = knots[i];
            let (pj, tj, dj) = knots[j];
            let t_end = if pj == p { tj } else { 1.0 };
            let depth = d.max(dj) + 1;
            if depth > opts.max_depth {
                return Err(Error::ResolutionFailure {
                    lambda: values[i].lambda,
                    max_depth: opts.max_depth,
                });
            }
            inserts.push((i, (p, 0.5 * (t + t_end), depth)));
        }
        if inserts.is_empty() {
            break;
        }
        let new_vals: Vec<EvansValue> = inserts.par_iter().map(|(_, k)| eval(k)).collect::<Result<_>>()?;
        let mut k2 = Vec::with_capacity(n + inserts.len());
        let mut v2 = Vec::with_capacity(n + inserts.len());
        let mut it = inserts.iter().zip(new_vals).peekable();
        for i in 0..n {
            k2.push(knots[i]);
            v2.push(values[i]);
            if let Some(((_, k), v)) = it.next_if(|((idx, _), _)| *idx == i) {
                k2.push(*k);
                v2.push(v);
            }
        }
        knots = k2;
        values = v2;
    }

    let n = values.len();
    let total: f64 = (0..n).map(|i| phase_step(&values[i], &values[(i + 1) % n])).sum();
    let turns = total / (2.0 * PI);
    let samples = knots
        .iter()
        .zip(values)
        .map(|(&(piece, t, depth), value)| ContourSample {
            piece,
            t,
            depth,
            value,
        })
        .collect::<Vec<_>>();
    Ok(EvansContourResult {
        contour: contour.clone(),
        max_depth_used: samples.iter().map(|s| s.depth).max().unwrap_or(0),
        samples,
        winding: turns.round() as i64,
        turns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evans::eval::constant_state_evans;
    use crate::shock_states::{flux_roots, ShockParams};

    fn constant_system() -> LinearizedSystem {
        let p = ShockParams::new(1.5, 1.0, 2f64.sqrt(), 1.0, 1.0, 1.1).unwrap();
        let (_, hi) = flux_roots(&p).unwrap();
        LinearizedSystem::constant(p, hi).unwrap()
    }

    #[test]
    fn half_disk_geometry() {
        let c = Contour::half_disk(10.0, 1e-3).unwrap();
        let a = c.pieces[0].point(1.0);
        let b = c.pieces[1].point(0.0);
        assert!((a - b).norm() < 1e-12);
        assert!((c.pieces[1].point(1.0) - c.pieces[0].point(0.0)).norm() < 1e-12);
        assert!((c.pieces[0].point(0.5) - C::new(10.0, 0.0)).norm() < 1e-12);
        assert!(Contour::half_disk(1.0, 2.0).is_err());
    }

    #[test]
    fn constant_state_has_no_zeros() {
        let sys = constant_system();
        let c = Contour::half_disk(10.0, 1e-3).unwrap();
        let r = winding_number(&sys, &c, &EvansOptions::default(), &WindingOptions::default()).unwrap();
        assert_eq!(r.winding, 0);
        assert!(r.turns.abs() < 1e-6);
        for s in &r.samples {
            let e = constant_state_evans(s.value.lambda, &sys.minus, &sys.params).unwrap();
            assert!((s.value.value() - e).norm() < 1e-8 * e.norm());
        }
        assert!(r.phase_steps().iter().all(|d| d.abs() < FRAC_PI_2));
    }

    #[test]
    fn reversal_flips_sign_of_turns() {
        let sys = constant_system();
        let c = Contour::circle(C::new(3.0, 0.0), 1.0);
        let a = winding_number(&sys, &c, &EvansOptions::default(), &WindingOptions::default()).unwrap();
        let b = winding_number(&sys, &c.reversed(), &EvansOptions::default(), &WindingOptions::default()).unwrap();
        assert!((a.turns + b.turns).abs() < 1e-9);
    }

    #[test]
    fn depth_limit_is_enforced() {
        let sys = constant_system();
        let c = Contour::circle(C::new(3.0, 0.0), 1.0);
        let opts = WindingOptions {
            samples_per_piece: 2,
            max_depth: 0,
            max_phase_step: 1e-6,
        };
        let r = winding_number(&sys, &c, &EvansOptions::default(), &opts);
        assert!(matches!(r, Err(Error::ResolutionFailure { max_depth: 0, .. })));
    }
}
