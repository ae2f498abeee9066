//! The Lyapunov set in the `(u1, u2)` chart and the pair set built on it.

mod arcs;
#[cfg(test)]
mod tests;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use arcs::{
    arc_alpha, direction, family_start, integrate_ode_arc, integrate_with_tol, ode_rhs, ode_rhs_closed_end,
    pivot_range, OdeArc, Which, ALPHA_ARC_SAMPLES, ODE_TOL, TOL_NORMAL,
};

use crate::geometry::{BoundaryCurve, LineRepr};
use crate::hinges::{BoundaryPoint, Chord, Family, HingeError, SpecialPoints, UPoint};
use crate::math;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LyapunovError {
    #[error(transparent)]
    Hinge(#[from] HingeError),
    #[error("chart point ({u1}, {u2}) left its chord family")]
    FamilyViolation { u1: f64, u2: f64 },
    #[error("arc integration did not terminate (a = {a})")]
    NoTermination { a: f64 },
    #[error("normality residual {residual:.3e} at the end of the arc")]
    NormalityNotReached { residual: f64 },
    #[error("right-hand side not positive at ({u1}, {u2}): {rhs:?}")]
    RhsNotPositive { u1: f64, u2: f64, rhs: [f64; 2] },
    #[error("ordering violated at the end of arc {0}")]
    OrderingViolated(&'static str),
    #[error("arcs intersect: segments {i} and {j}")]
    ArcsIntersect { i: usize, j: usize },
    #[error("connector impossible: {0}")]
    ConnectorImpossible(&'static str),
    #[error("coincident points")]
    CoincidentPoints,
}

impl From<crate::geometry::GeometryError> for LyapunovError {
    fn from(e: crate::geometry::GeometryError) -> Self {
        LyapunovError::Hinge(HingeError::Geometry(e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledArc {
    pub label: String,
    pub points: Vec<UPoint>,
}

/// Corner points of the loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corners {
    pub u2: UPoint,
    pub u3: UPoint,
    pub u4: UPoint,
    pub u5: UPoint,
    pub u2p: UPoint,
    pub u3p: UPoint,
    pub u4p: UPoint,
    pub u5p: UPoint,
    /// Corners of the two L-shaped connectors.
    pub connector: UPoint,
    pub connector_p: UPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSet {
    pub special: SpecialPoints,
    pub arcs: Vec<LabeledArc>,
    pub corners: Corners,
    /// `a*` for the families in the order lower plain, upper plain, lower
    /// primed, upper primed.
    pub a_star: [f64; 4],
    pub ode: Vec<OdeArc>,
    /// Closed polyline (first point repeated at the end).
    pub ring: Vec<UPoint>,
}

const ON_BOUNDARY: f64 = 1e-9;

fn segments_cross(a0: UPoint, a1: UPoint, b0: UPoint, b1: UPoint) -> bool {
    let v = |p: UPoint| Vec2::new(p.u1, p.u2);
    let (a0, a1, b0, b1) = (v(a0), v(a1), v(b0), v(b1));
    let o = |p: Vec2, q: Vec2, r: Vec2| robust::orient2d(
        robust::Coord { x: p.x, y: p.y },
        robust::Coord { x: q.x, y: q.y },
        robust::Coord { x: r.x, y: r.y },
    );
    let d1 = o(b0, b1, a0);
    let d2 = o(b0, b1, a1);
    let d3 = o(a0, a1, b0);
    let d4 = o(a0, a1, b1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn reversed(mut v: Vec<UPoint>) -> Vec<UPoint> {
    v.reverse();
    v
}

fn boundary_point(curve: &BoundaryCurve, s: f64) -> BoundaryPoint {
    BoundaryPoint { s, xy: curve.point_at(s) }
}

/// Builds the loop: lower arc, alpha arc, upper arc, connector, and the
/// primed counterparts.
pub fn assemble(curve: &BoundaryCurve, special: &SpecialPoints) -> Result<LyapunovSet, LyapunovError> {
    let mut sp = *special;
    let lower = integrate_ode_arc(curve, &sp, Family::LowerPlain)?;
    let upper = integrate_ode_arc(curve, &sp, Family::UpperPlain)?;
    let lower_p = integrate_ode_arc(curve, &sp, Family::LowerPrime)?;
    let upper_p = integrate_ode_arc(curve, &sp, Family::UpperPrime)?;
    let alpha = arc_alpha(curve, &sp, Which::Plain)?;
    let alpha_p = arc_alpha(curve, &sp, Which::Primed)?;

    let u2 = lower.u_end;
    let u3 = family_start(&sp, Family::LowerPlain);
    let u4 = family_start(&sp, Family::UpperPlain);
    let u5 = upper.u_end;
    let u2p = lower_p.u_end;
    let u3p = family_start(&sp, Family::LowerPrime);
    let u4p = family_start(&sp, Family::UpperPrime);
    let u5p = upper_p.u_end;

    if !(u5.u1 < u2p.u1) {
        return Err(LyapunovError::ConnectorImpossible("P5 < P'2"));
    }
    if !(u2p.u2 < u5.u2) {
        return Err(LyapunovError::ConnectorImpossible("Q'2 < Q5"));
    }
    if !(u2.u1 < u5p.u1) {
        return Err(LyapunovError::ConnectorImpossible("P2 < P'5"));
    }
    if !(u5p.u2 < u2.u2) {
        return Err(LyapunovError::ConnectorImpossible("Q'5 < Q2"));
    }
    let connector = UPoint::new(u2p.u1, u5.u2);
    let connector_p = UPoint::new(u2.u1, u5p.u2);

    let arcs = alloc::vec![
        LabeledArc { label: "u2-u3".into(), points: reversed(lower.points.clone()) },
        LabeledArc { label: "u3-u4".into(), points: alpha },
        LabeledArc { label: "u4-u5".into(), points: upper.points.clone() },
        LabeledArc { label: "u5-u2'".into(), points: alloc::vec![u5, connector, u2p] },
        LabeledArc { label: "u2'-u3'".into(), points: reversed(lower_p.points.clone()) },
        LabeledArc { label: "u3'-u4'".into(), points: alpha_p },
        LabeledArc { label: "u4'-u5'".into(), points: upper_p.points.clone() },
        LabeledArc { label: "u5'-u2".into(), points: alloc::vec![u5p, connector_p, u2] },
    ];
    let mut ring: Vec<UPoint> = Vec::new();
    for arc in &arcs {
        for (i, &p) in arc.points.iter().enumerate() {
            // consecutive arcs share their junction point
            if i == 0 && !ring.is_empty() {
                continue;
            }
            ring.push(p);
        }
    }
    let n = ring.len() - 1;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                return Err(LyapunovError::ArcsIntersect { i, j });
            }
        }
    }

    let pt = |u: UPoint| {
        (
            Some(boundary_point(curve, special.s_of_u1(u.u1))),
            Some(boundary_point(curve, special.s_of_u2(u.u2))),
        )
    };
    (sp.plain.p2, sp.plain.q2) = pt(u2);
    (sp.plain.p5, sp.plain.q5) = pt(u5);
    (sp.primed.p2, sp.primed.q2) = pt(u2p);
    (sp.primed.p5, sp.primed.q5) = pt(u5p);
    Ok(LyapunovSet {
        special: sp,
        arcs,
        corners: Corners { u2, u3, u4, u5, u2p, u3p, u4p, u5p, connector, connector_p },
        a_star: [lower.a_star, upper.a_star, lower_p.a_star, upper_p.a_star],
        ode: alloc::vec![lower, upper, lower_p, upper_p],
        ring,
    })
}

fn dist_to_segment(p: UPoint, a: UPoint, b: UPoint) -> f64 {
    let (px, py) = (p.u1 - a.u1, p.u2 - a.u2);
    let (dx, dy) = (b.u1 - a.u1, b.u2 - a.u2);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 { ((px * dx + py * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    math::hypot(px - t * dx, py - t * dy)
}

impl LyapunovSet {
    /// Closed-set membership: even-odd rule, boundary points count as inside.
    pub fn contains(&self, u: UPoint) -> bool {
        let r = &self.ring;
        let mut inside = false;
        for w in r.windows(2) {
            let (a, b) = (w[0], w[1]);
            if dist_to_segment(u, a, b) <= ON_BOUNDARY {
                return true;
            }
            if (a.u2 > u.u2) != (b.u2 > u.u2) {
                let x = a.u1 + (u.u2 - a.u2) * (b.u1 - a.u1) / (b.u2 - a.u2);
                if u.u1 < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Largest distance between consecutive arcs' shared endpoints.
    pub fn closure_gap(&self) -> f64 {
        let n = self.arcs.len();
        (0..n)
            .map(|i| {
                let a = *self.arcs[i].points.last().unwrap();
                let b = self.arcs[(i + 1) % n].points[0];
                math::hypot(a.u1 - b.u1, a.u2 - b.u2)
            })
            .fold(0.0, f64::max)
    }

    /// Whether `(x, y)` belongs to the pair set: the mirror of the two points
    /// maps into the set and `y` lies to the right of `x`.
    pub fn pair_in_t(&self, curve: &BoundaryCurve, x: Vec2, y: Vec2) -> Result<bool, LyapunovError> {
        let d = y - x;
        if d.norm() <= curve.tolerances().close {
            return Err(LyapunovError::CoincidentPoints);
        }
        if !(d.x > 0.0) {
            return Ok(false);
        }
        let Some(u) = mirror_chart_point(curve, &self.special, x, y) else {
            return Ok(false);
        };
        Ok(self.contains(u))
    }
}

/// Chart coordinates of the perpendicular bisector of `x` and `y`, if it
/// meets both the lower and the upper part of the boundary.
pub fn mirror_chart_point(curve: &BoundaryCurve, sp: &SpecialPoints, x: Vec2, y: Vec2) -> Option<UPoint> {
    let d = y - x;
    let line = LineRepr::new(d.angle() + math::FRAC_PI_2, (x + y) * 0.5);
    let h = curve.line_boundary_intersections(&line).ok()?;
    let chord = Chord::from_parts(h.s_p, h.s_q, h.p, h.q);
    sp.phi(&chord, curve.tolerances().close).ok()
}
