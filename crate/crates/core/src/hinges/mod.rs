//! Active points, hinges, extremal hinge points, the special boundary points
//! and the `(u1, u2)` chart of admissible chords.

mod chord;
mod extremal;
mod scan;
mod special;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use chord::Chord;
pub use extremal::{extended_pair, extremal_pair, extremal_points, Extremal, ExtremalPair, PairPoint};
pub use scan::{BoundaryScan, HingeKinds};
pub use special::{
    compute_special_points, normal_angle_at, normal_line_angle_at, BoundaryPoint, Family, SpecialPoints, SpecialRow, UPoint,
    SCAN_SAMPLES,
};

use crate::geometry::{BoundaryCurve, GeometryError};
use crate::vec2::Vec2;

/// Tangent lines with `|p . t| >= 1 - TOL_PAR` count as parallel to the chord.
pub const TOL_PAR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HingeError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("boundary point s = {s} lies on the mirror")]
    OnMirror { s: f64 },
    #[error("no intersection of the right boundary with the reflected left boundary")]
    NoIntersection,
    #[error("{count} intersections of the right boundary with the reflected left boundary")]
    MultipleIntersections { count: usize },
    #[error("tangential intersection (crossing angle {angle:.3e})")]
    TangentialIntersection { angle: f64 },
    #[error("extremal hinge distances out of order: far {d_far}, near {d_near}")]
    DistanceOrder { d_far: f64, d_near: f64 },
    #[error("extremal point at s = {s} has no hinge of the expected level")]
    WrongHingeLevel { s: f64 },
    #[error("chord is not admissible")]
    NotAdmissible,
    #[error("chord nearly tangent to the boundary at an endpoint")]
    DegenerateChord,
    #[error("orientation condition violated: {0}")]
    OrientationViolated(&'static str),
    #[error("no hinge-free arc of chords exists")]
    EmptyHingeFreeArc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hinge {
    pub s_a: f64,
    #[serde(rename = "A")]
    pub a: Vec2,
    #[serde(rename = "H")]
    pub h: Vec2,
    pub side: Side,
    pub level: Level,
    /// `|H - Q|` for upper hinges, `|H - P|` for lower ones.
    pub d: f64,
}

fn side_of(chord: &Chord, a: Vec2) -> Side {
    if chord.side_value(a) < 0.0 {
        Side::Left
    } else {
        Side::Right
    }
}

/// Whether the reflection of `point_at(s_a)` across the chord lies in the closed domain.
pub fn is_active(curve: &BoundaryCurve, chord: &Chord, s_a: f64) -> Result<bool, HingeError> {
    let a = curve.point_at(s_a);
    if chord.side_value(a).abs() <= curve.tolerances().bd {
        return Err(HingeError::OnMirror { s: s_a });
    }
    Ok(curve.in_closure(chord.reflect(a), curve.tolerances().bd))
}

/// Hinge from a point and its inward normal, ignoring activity.
pub(crate) fn hinge_geometry(chord: &Chord, s_a: f64, a: Vec2, n: Vec2) -> Option<Hinge> {
    let t = n.perp_neg();
    if chord.p.dot(t).abs() >= 1.0 - TOL_PAR {
        return None;
    }
    let lambda = chord.tangent_meet(a, n)?;
    let len = chord.length();
    let h = chord.p_pt + chord.p * lambda;
    // H is outside the open chord for a supporting tangent; split at the midpoint
    let (level, d) = if lambda >= 0.5 * len {
        (Level::Upper, (lambda - len).abs())
    } else {
        (Level::Lower, lambda.abs())
    };
    Some(Hinge { s_a, a, h, side: side_of(chord, a), level, d })
}

/// The hinge of the boundary point at `s_a`, if it exists.
pub fn hinge_of(curve: &BoundaryCurve, chord: &Chord, s_a: f64) -> Result<Option<Hinge>, HingeError> {
    if !is_active(curve, chord, s_a)? {
        return Ok(None);
    }
    let a = curve.point_at(s_a);
    Ok(hinge_geometry(chord, s_a, a, curve.normal_one_sided(s_a)))
}

/// All hinges among `n` uniformly spaced boundary points.
pub fn scan_hinges(curve: &BoundaryCurve, chord: &Chord, n: usize) -> Vec<Hinge> {
    let mut out = Vec::new();
    for i in 0..n {
        let s = curve.total_length() * (i as f64 + 0.5) / n as f64;
        if let Ok(Some(h)) = hinge_of(curve, chord, s) {
            out.push(h);
        }
    }
    out
}

/// Normal-line data of a chord: `p . n(P)` and `p . n(Q)`.
pub fn chord_endpoint_dots(curve: &BoundaryCurve, chord: &Chord) -> Result<(f64, f64), HingeError> {
    let np = curve.normal_one_sided(chord.s_p);
    let nq = curve.normal_one_sided(chord.s_q);
    let (a, b) = (chord.p.dot(np), chord.p.dot(nq));
    if a.abs() < 1e-12 || b.abs() < 1e-12 {
        return Err(HingeError::DegenerateChord);
    }
    Ok((a, b))
}

/// `F` for a point `x` on the boundary with inward normal `n_x`.
pub fn field_f_with(chord: &Chord, pn_p: f64, pn_q: f64, x: Vec2, n_x: Vec2, v: f64) -> [f64; 2] {
    [
        -(x - chord.p_pt).dot(n_x) / (pn_p * v),
        (x - chord.q_pt).dot(n_x) / (pn_q * v),
    ]
}

/// `G` for a point `y` on the boundary with inward normal `n_y`.
pub fn field_g_with(chord: &Chord, pn_p: f64, pn_q: f64, y: Vec2, n_y: Vec2, v: f64) -> [f64; 2] {
    [
        (y - chord.p_pt).dot(n_y) / (pn_p * v),
        -(y - chord.q_pt).dot(n_y) / (pn_q * v),
    ]
}

/// The vector field multiplying `d|L|` in the mirror dynamics.
pub fn field_f(curve: &BoundaryCurve, chord: &Chord, x: Vec2, v: f64) -> Result<[f64; 2], HingeError> {
    let (a, b) = chord_endpoint_dots(curve, chord)?;
    let n = curve.normal_one_sided(curve.nearest_point(x).s);
    Ok(field_f_with(chord, a, b, x, n, v))
}

/// The vector field multiplying `d|M|` in the mirror dynamics.
pub fn field_g(curve: &BoundaryCurve, chord: &Chord, y: Vec2, v: f64) -> Result<[f64; 2], HingeError> {
    let (a, b) = chord_endpoint_dots(curve, chord)?;
    let n = curve.normal_one_sided(curve.nearest_point(y).s);
    Ok(field_g_with(chord, a, b, y, n, v))
}


#[cfg(test)]
mod tests;
