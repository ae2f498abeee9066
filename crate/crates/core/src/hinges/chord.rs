use serde::{Deserialize, Serialize};

use super::HingeError;
use crate::geometry::{BoundaryCurve, LineRepr};
use crate::math::{self, PI};
use crate::vec2::Vec2;

/// An oriented chord `[P, Q]` with `(Q - P) . e2 > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub s_p: f64,
    pub s_q: f64,
    #[serde(rename = "P")]
    pub p_pt: Vec2,
    #[serde(rename = "Q")]
    pub q_pt: Vec2,
    pub angle: f64,
    pub p: Vec2,
    pub m: Vec2,
}

impl Chord {
    pub fn from_line(curve: &BoundaryCurve, line: &LineRepr) -> Result<Chord, HingeError> {
        let h = curve.line_boundary_intersections(line)?;
        Ok(Chord::from_parts(h.s_p, h.s_q, h.p, h.q))
    }

    /// The chord through `x` at direction `angle`.
    pub fn through(curve: &BoundaryCurve, angle: f64, x: Vec2) -> Result<Chord, HingeError> {
        Chord::from_line(curve, &LineRepr::new(angle, x))
    }

    /// Chord between two boundary positions (ordered internally).
    pub fn from_arclengths(curve: &BoundaryCurve, s_a: f64, s_b: f64) -> Chord {
        let a = curve.point_at(s_a);
        let b = curve.point_at(s_b);
        let v = b - a;
        let swap = if v.y.abs() > curve.tolerances().close { v.y < 0.0 } else { v.x < 0.0 };
        if swap {
            Chord::from_parts(curve.wrap(s_b), curve.wrap(s_a), b, a)
        } else {
            Chord::from_parts(curve.wrap(s_a), curve.wrap(s_b), a, b)
        }
    }

    pub(crate) fn from_parts(s_p: f64, s_q: f64, p_pt: Vec2, q_pt: Vec2) -> Chord {
        let p = (q_pt - p_pt).normalized();
        let angle = math::rem_pos(p.angle(), PI);
        Chord { s_p, s_q, p_pt, q_pt, angle, p, m: p.perp_neg() }
    }

    pub fn line(&self) -> LineRepr {
        LineRepr { angle: self.angle, anchor: self.p_pt }
    }

    pub fn length(&self) -> f64 {
        self.p_pt.dist(self.q_pt)
    }

    /// Negative on the left of the chord, positive on the right.
    #[inline]
    pub fn side_value(&self, x: Vec2) -> f64 {
        (x - self.p_pt).dot(self.m)
    }

    #[inline]
    pub fn reflect(&self, x: Vec2) -> Vec2 {
        x - self.m * (2.0 * self.side_value(x))
    }

    /// Parameter `lambda` of the point `P + lambda p` where the tangent line at
    /// `a` (with normal `n`) meets the chord line, if not parallel.
    #[inline]
    pub fn tangent_meet(&self, a: Vec2, n: Vec2) -> Option<f64> {
        let c = self.p.dot(n);
        if c == 0.0 {
            None
        } else {
            Some((a - self.p_pt).dot(n) / c)
        }
    }
}
