//! Closed-form roots of monic complex quartics (Ferrari) with Newton polishing.

use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

/// Four roots sorted by real part, then imaginary part.
///
/// `ids` label the roots for continuation along a path; a fresh solve
/// numbers them in sorted order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticRoots {
    pub roots: [C; 4],
    pub ids: [usize; 4],
}

impl QuarticRoots {
    /// Relabels `self` so that each root inherits the id of the nearest
    /// root in `prev` (optimal assignment over all 24 pairings).
    ///
    /// Returns the largest displacement of the matching.
    pub fn continue_from(&mut self, prev: &QuarticRoots) -> f64 {
        let perm = best_matching(&prev.roots, &self.roots);
        let mut ids = [0; 4];
        let mut worst = 0.0f64;
        for (i, &j) in perm.iter().enumerate() {
            ids[j] = prev.ids[i];
            worst = worst.max((prev.roots[i] - self.roots[j]).norm());
        }
        self.ids = ids;
        worst
    }

    pub fn min_separation(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                d = d.min((self.roots[i] - self.roots[j]).norm());
            }
        }
        d
    }
}

/// All 24 permutations of four indices, in lexicographic order.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if distinct {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Permutation `perm` minimising `max_i |a[i] − b[perm[i]]|`, ties broken by the sum.
pub fn best_matching(a: &[C; 4], b: &[C; 4]) -> [usize; 4] {
    let mut best = [0, 1, 2, 3];
    let mut key = (f64::INFINITY, f64::INFINITY);
    for p in permutations4() {
        let d: Vec<f64> = (0..4).map(|i| (a[i] - b[p[i]]).norm()).collect();
        let k = (d.iter().cloned().fold(0.0, f64::max), d.iter().sum::<f64>());
        if k.0 < key.0 || (k.0 == key.0 && k.1 < key.1) {
            key = k;
            best = p;
        }
    }
    best
}

pub fn eval_quartic(c: &[C; 4], z: C) -> C {
    (((z + c[0]) * z + c[1]) * z + c[2]) * z + c[3]
}

/// Scale used in residual checks: `1 + Σ|c_i|·|z|^i` style magnitude.
pub fn residual_scale(c: &[C; 4], z: C) -> f64 {
    let r = z.norm();
    r.powi(4) + c[0].norm() * r.powi(3) + c[1].norm() * r * r + c[2].norm() * r + c[3].norm()
}

/// Roots of `z⁴ + c3 z³ + c2 z² + c1 z + c0`.
pub fn solve_quartic(c3: C, c2: C, c1: C, c0: C) -> QuarticRoots {
    let coeffs = [c3, c2, c1, c0];
    let zero = C::new(0.0, 0.0);
    // Exact zero roots are factored out; Ferrari resolves them only to √ε.
    if c0 == zero {
        let rest = if c1 == zero {
            let [u, v] = solve_quadratic(c3, c2);
            [zero, u, v]
        } else {
            solve_cubic(c3, c2, c1)
        };
        let mut roots = [zero, rest[0], rest[1], rest[2]].map(|z| C::new(z.re + 0.0, z.im + 0.0));
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        return QuarticRoots {
            roots,
            ids: [0, 1, 2, 3],
        };
    }
    let shift = c3 / 4.0;
    let c3sq = c3 * c3;
    let p = c2 - c3sq * 3.0 / 8.0;
    let q = c1 - c3 * c2 / 2.0 + c3sq * c3 / 8.0;
    let r = c0 - c3 * c1 / 4.0 + c3sq * c2 / 16.0 - c3sq * c3sq * 3.0 / 256.0;

    let scale = 1.0 + p.norm() + q.norm().sqrt() + r.norm().sqrt();
    let ys: [C; 4] = if q.norm() <= 1e-14 * scale.powi(3) {
        // Biquadratic: y² = w.
        let disc = (p * p - r * 4.0).sqrt();
        let w1 = (-p + disc) / 2.0;
        let w2 = (-p - disc) / 2.0;
        let (a, b) = (w1.sqrt(), w2.sqrt());
        [a, -a, b, -b]
    } else {
        // Resolvent m³ + p m² + (p²/4 − r) m − q²/8 = 0, largest root.
        let ms = solve_cubic(p, p * p / 4.0 - r, -q * q / 8.0);
        let m = ms
            .into_iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        let s = (m * 2.0).sqrt();
        let t = q / (s * 2.0);
        let h = p / 2.0 + m;
        let (a1, a0) = (-s, h + t);
        let (b1, b0) = (s, h - t);
        let [u, v] = solve_quadratic(a1, a0);
        let [w, x] = solve_quadratic(b1, b0);
        [u, v, w, x]
    };
    // `+ 0.0` folds −0 into +0 so the ordering is sign-of-zero independent.
    let mut roots = ys.map(|y| {
        let z = polish(&coeffs, y - shift);
        C::new(z.re + 0.0, z.im + 0.0)
    });
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    QuarticRoots {
        roots,
        ids: [0, 1, 2, 3],
    }
}

fn solve_quadratic(b: C, c: C) -> [C; 2] {
    let d = (b * b - c * 4.0).sqrt();
    // Avoid cancellation: take the larger-magnitude root first.
    let q = if (b.conj() * d).re >= 0.0 {
        -(b + d) / 2.0
    } else {
        -(b - d) / 2.0
    };
    if q.norm() == 0.0 {
        return [C::new(0.0, 0.0), C::new(0.0, 0.0)];
    }
    [q, c / q]
}

/// Roots of `x³ + a x² + b x + c` (Cardano with Newton polishing).
pub fn solve_cubic(a: C, b: C, c: C) -> [C; 3] {
    let shift = a / 3.0;
    let pp = b - a * a / 3.0;
    let qq = a * a * a * 2.0 / 27.0 - a * b / 3.0 + c;
    let disc = (qq * qq / 4.0 + pp * pp * pp / 27.0).sqrt();
    let cand1 = -qq / 2.0 + disc;
    let cand2 = -qq / 2.0 - disc;
    let big = if cand1.norm() >= cand2.norm() { cand1 } else { cand2 };
    let omega = C::new(-0.5, 3f64.sqrt() / 2.0);
    let mut out = [C::new(0.0, 0.0); 3];
    if big.norm() == 0.0 {
        out = [C::new(0.0, 0.0); 3];
    } else {
        let u0 = big.powf(1.0 / 3.0);
        let mut u = u0;
        for t in out.iter_mut() {
            *t = u - pp / (u * 3.0);
            u *= omega;
        }
    }
    out.map(|t| {
        let mut x = t - shift;
        for _ in 0..3 {
            let f = ((x + a) * x + b) * x + c;
            let df = (x * 3.0 + a * 2.0) * x + b;
            if df.norm() == 0.0 {
                break;
            }
            let next = x - f / df;
            let fn_ = ((next + a) * next + b) * next + c;
            if next.is_finite() && fn_.norm() < f.norm() {
                x = next;
            } else {
                break;
            }
        }
        x
    })
}

fn polish(c: &[C; 4], mut z: C) -> C {
    for _ in 0..4 {
        let f = eval_quartic(c, z);
        if f.norm() == 0.0 {
            break;
        }
        let df = ((z * 4.0 + c[0] * 3.0) * z + c[1] * 2.0) * z + c[2];
        if df.norm() == 0.0 {
            break;
        }
        let next = z - f / df;
        if next.is_finite() && eval_quartic(c, next).norm() < f.norm() {
            z = next;
        } else {
            break;
        }
    }
    z
}
