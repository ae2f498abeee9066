use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math::{self, TAU};
use crate::vec2::Vec2;

/// One analytic piece of the boundary, traversed counterclockwise.
///
/// Arcs are parametrized by the polar angle `t` in `[from, to]`; segments by
/// `t` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryPiece {
    CircleArc {
        center: Vec2,
        radius: f64,
        from: f64,
        to: f64,
    },
    EllipseArc {
        center: Vec2,
        semi_axes: [f64; 2],
        from: f64,
        to: f64,
    },
    Segment {
        from: Vec2,
        to: Vec2,
    },
}

impl BoundaryPiece {
    pub fn param_range(&self) -> (f64, f64) {
        match *self {
            BoundaryPiece::CircleArc { from, to, .. } | BoundaryPiece::EllipseArc { from, to, .. } => {
                (from, to)
            }
            BoundaryPiece::Segment { .. } => (0.0, 1.0),
        }
    }

    pub fn eval(&self, t: f64) -> Vec2 {
        match *self {
            BoundaryPiece::CircleArc { center, radius, .. } => {
                center + Vec2::new(math::cos(t), math::sin(t)) * radius
            }
            BoundaryPiece::EllipseArc { center, semi_axes: [a, b], .. } => {
                center + Vec2::new(a * math::cos(t), b * math::sin(t))
            }
            BoundaryPiece::Segment { from, to } => from.lerp(to, t),
        }
    }

    pub fn d1(&self, t: f64) -> Vec2 {
        match *self {
            BoundaryPiece::CircleArc { radius, .. } => Vec2::new(-math::sin(t), math::cos(t)) * radius,
            BoundaryPiece::EllipseArc { semi_axes: [a, b], .. } => {
                Vec2::new(-a * math::sin(t), b * math::cos(t))
            }
            BoundaryPiece::Segment { from, to } => to - from,
        }
    }

    pub fn d2(&self, t: f64) -> Vec2 {
        match *self {
            BoundaryPiece::CircleArc { radius, .. } => -Vec2::new(math::cos(t), math::sin(t)) * radius,
            BoundaryPiece::EllipseArc { semi_axes: [a, b], .. } => {
                -Vec2::new(a * math::cos(t), b * math::sin(t))
            }
            BoundaryPiece::Segment { .. } => Vec2::ZERO,
        }
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.d1(t).norm()
    }

    /// Signed curvature; nonnegative on a counterclockwise convex piece.
    pub fn curvature(&self, t: f64) -> f64 {
        match *self {
            BoundaryPiece::CircleArc { radius, .. } => 1.0 / radius,
            BoundaryPiece::Segment { .. } => 0.0,
            BoundaryPiece::EllipseArc { .. } => {
                let v = self.d1(t);
                let sp = v.norm();
                v.cross(self.d2(t)) / (sp * sp * sp)
            }
        }
    }

    pub fn start(&self) -> Vec2 {
        self.eval(self.param_range().0)
    }

    pub fn end(&self) -> Vec2 {
        self.eval(self.param_range().1)
    }

    /// A copy restricted to the parameter window `[t0, t1]`.
    pub fn restricted(&self, t0: f64, t1: f64) -> BoundaryPiece {
        match *self {
            BoundaryPiece::CircleArc { center, radius, .. } => BoundaryPiece::CircleArc {
                center,
                radius,
                from: t0,
                to: t1,
            },
            BoundaryPiece::EllipseArc { center, semi_axes, .. } => BoundaryPiece::EllipseArc {
                center,
                semi_axes,
                from: t0,
                to: t1,
            },
            BoundaryPiece::Segment { .. } => BoundaryPiece::Segment {
                from: self.eval(t0),
                to: self.eval(t1),
            },
        }
    }

    pub(crate) fn validate(&self) -> Result<(), &'static str> {
        let finite = |v: f64| v.is_finite();
        match *self {
            BoundaryPiece::CircleArc { center, radius, from, to } => {
                if !center.is_finite() || !finite(radius) || !finite(from) || !finite(to) {
                    return Err("non-finite parameter");
                }
                if radius <= 0.0 {
                    return Err("radius must be positive");
                }
                if to <= from {
                    return Err("arc must run counterclockwise with nonzero extent");
                }
                if to - from > TAU + 1e-12 {
                    return Err("arc extent exceeds a full turn");
                }
            }
            BoundaryPiece::EllipseArc { center, semi_axes: [a, b], from, to } => {
                if !center.is_finite() || !finite(a) || !finite(b) || !finite(from) || !finite(to) {
                    return Err("non-finite parameter");
                }
                if a <= 0.0 || b <= 0.0 {
                    return Err("semi-axes must be positive");
                }
                if to <= from {
                    return Err("arc must run counterclockwise with nonzero extent");
                }
                if to - from > TAU + 1e-12 {
                    return Err("arc extent exceeds a full turn");
                }
            }
            BoundaryPiece::Segment { from, to } => {
                if !from.is_finite() || !to.is_finite() {
                    return Err("non-finite parameter");
                }
                if from == to {
                    return Err("zero-length segment");
                }
            }
        }
        Ok(())
    }

    /// Intersections of the line `a + lambda * d` with the piece, as
    /// `(lambda, t)` pairs with `t` inside the parameter range (slack `eps`).
    pub(crate) fn line_hits(&self, a: Vec2, d: Vec2, eps: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        match *self {
            BoundaryPiece::CircleArc { center, radius, from, to } => {
                conic_hits(a, d, center, radius, radius, from, to, eps, &mut out)
            }
            BoundaryPiece::EllipseArc { center, semi_axes: [ax, by], from, to } => {
                conic_hits(a, d, center, ax, by, from, to, eps, &mut out)
            }
            BoundaryPiece::Segment { from, to } => {
                let e = to - from;
                let den = d.cross(e);
                if den.abs() > 1e-300 {
                    let w = from - a;
                    let lambda = w.cross(e) / den;
                    let u = w.cross(d) / den;
                    let slack = eps / e.norm();
                    if u >= -slack && u <= 1.0 + slack {
                        out.push((lambda, u.clamp(0.0, 1.0)));
                    }
                }
            }
        }
        out
    }

    /// Nearest point of the piece to `x`, as `(t, distance)`.
    pub(crate) fn nearest(&self, x: Vec2) -> (f64, f64) {
        let (t0, t1) = self.param_range();
        match *self {
            BoundaryPiece::Segment { from, to } => {
                let e = to - from;
                let u = ((x - from).dot(e) / e.norm2()).clamp(0.0, 1.0);
                (u, x.dist(self.eval(u)))
            }
            BoundaryPiece::CircleArc { center, radius, .. } => {
                let w = x - center;
                let phi = w.angle();
                let t = t0 + math::rem_pos(phi - t0, TAU);
                if w.norm2() > 0.0 && t <= t1 {
                    return (t, (w.norm() - radius).abs());
                }
                let d0 = x.dist(self.eval(t0));
                let d1 = x.dist(self.eval(t1));
                if d0 <= d1 {
                    (t0, d0)
                } else {
                    (t1, d1)
                }
            }
            BoundaryPiece::EllipseArc { .. } => {
                const N: usize = 24;
                let mut best = (t0, x.dist(self.eval(t0)));
                let mut best_j = 0;
                for j in 1..=N {
                    let t = t0 + (t1 - t0) * j as f64 / N as f64;
                    let dd = x.dist(self.eval(t));
                    if dd < best.1 {
                        best = (t, dd);
                        best_j = j;
                    }
                }
                let lo = t0 + (t1 - t0) * (best_j.saturating_sub(1)) as f64 / N as f64;
                let hi = t0 + (t1 - t0) * ((best_j + 1).min(N)) as f64 / N as f64;
                // f(t) = (E(t) - x) . E'(t) vanishes at the foot
                let f = |t: f64| (self.eval(t) - x).dot(self.d1(t));
                let (mut a, mut b) = (lo, hi);
                let (fa, fb) = (f(a), f(b));
                if fa < 0.0 && fb > 0.0 {
                    let mut t = best.0.clamp(a, b);
                    for _ in 0..60 {
                        let ft = f(t);
                        if ft < 0.0 {
                            a = t;
                        } else {
                            b = t;
                        }
                        let v = self.d1(t);
                        let df = v.norm2() + (self.eval(t) - x).dot(self.d2(t));
                        let mut tn = if df > 0.0 { t - ft / df } else { 0.5 * (a + b) };
                        if !(tn > a && tn < b) {
                            tn = 0.5 * (a + b);
                        }
                        if (tn - t).abs() < 1e-15 * (1.0 + t.abs()) || (b - a) < 1e-15 {
                            t = tn;
                            break;
                        }
                        t = tn;
                    }
                    let dd = x.dist(self.eval(t));
                    if dd < best.1 {
                        best = (t, dd);
                    }
                }
                best
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn conic_hits(
    a: Vec2,
    d: Vec2,
    c: Vec2,
    ax: f64,
    by: f64,
    from: f64,
    to: f64,
    eps: f64,
    out: &mut Vec<(f64, f64)>,
) {
    // scale to the unit circle
    let p = Vec2::new((a.x - c.x) / ax, (a.y - c.y) / by);
    let q = Vec2::new(d.x / ax, d.y / by);
    let qa = q.norm2();
    let qb = 2.0 * p.dot(q);
    let qc = p.norm2() - 1.0;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 || qa == 0.0 {
        return;
    }
    let sq = math::sqrt(disc);
    // numerically stable roots
    let k = -0.5 * (qb + if qb >= 0.0 { sq } else { -sq });
    let mut roots = [k / qa, if k != 0.0 { qc / k } else { -qb / (2.0 * qa) }];
    if roots[0] > roots[1] {
        roots.swap(0, 1);
    }
    let scale = ax.max(by);
    let slack = eps / scale;
    for (i, &lambda) in roots.iter().enumerate() {
        if i == 1 && disc == 0.0 {
            break;
        }
        let u = p + q * lambda;
        let phi = math::atan2(u.y, u.x);
        let mut t = from + math::rem_pos(phi - from, TAU);
        if t > to + slack {
            // close to the start from below?
            if (t - TAU - from).abs() <= slack {
                t = from;
            } else {
                continue;
            }
        }
        out.push((lambda, t.min(to)));
    }
}
