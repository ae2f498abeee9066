use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{hinge_geometry, Chord, Family, Hinge, HingeError, Side};
use crate::geometry::BoundaryCurve;
use crate::math;
use crate::vec2::Vec2;

/// A boundary point with its inward normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub s: f64,
    pub pt: Vec2,
    pub n: Vec2,
}

/// The left/right extremal points of a chord (no hinge validation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPair {
    pub left: PairPoint,
    pub right: PairPoint,
    /// Angle between the boundary and the reflected boundary at the crossing.
    pub crossing_angle: f64,
}

/// Extremal points with their hinges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremal {
    pub a_left: Vec2,
    pub h_left: Hinge,
    pub a_right: Vec2,
    pub h_right: Hinge,
    pub crossing_angle: f64,
}

const N_UNIFORM: usize = 256;
const N_LOG: usize = 14;

fn far_arc(curve: &BoundaryCurve, chord: &Chord, far: Side) -> (f64, f64) {
    match far {
        Side::Left => (chord.s_q, curve.forward(chord.s_q, chord.s_p)),
        Side::Right => (chord.s_p, curve.forward(chord.s_p, chord.s_q)),
    }
}

fn pair_point(curve: &BoundaryCurve, s: f64) -> PairPoint {
    let s = curve.wrap(s);
    PairPoint { s, pt: curve.point_at(s), n: curve.normal_one_sided(s) }
}

fn reflected_partner(curve: &BoundaryCurve, chord: &Chord, far: PairPoint) -> PairPoint {
    let foot = curve.nearest_point(chord.reflect(far.pt));
    pair_point(curve, foot.s)
}

fn crossing_angle(curve: &BoundaryCurve, chord: &Chord, far: &PairPoint, near: &PairPoint) -> f64 {
    let t_far = curve.tangent_at(far.s);
    let t = curve.tangent_at(near.s);
    let t_ref = t - chord.m * (2.0 * t.dot(chord.m));
    let a = math::atan2(t_far.cross(t_ref), t_far.dot(t_ref)).abs();
    a.min(math::PI - a)
}

fn assemble(far_side: Side, far: PairPoint, near: PairPoint, angle: f64) -> ExtremalPair {
    match far_side {
        Side::Left => ExtremalPair { left: far, right: near, crossing_angle: angle },
        Side::Right => ExtremalPair { left: near, right: far, crossing_angle: angle },
    }
}

/// Locates the unique crossing of the far-side boundary with the reflection
/// of the other side; the partner point is its mirror image.
pub fn extremal_pair(curve: &BoundaryCurve, chord: &Chord, family: Family) -> Result<ExtremalPair, HingeError> {
    let far_side = family.far_side();
    let (start, len) = far_arc(curve, chord, far_side);
    let diam = curve.diameter();
    let excl = (1e-4 * diam).min(0.1 * len);
    let mut taus: Vec<f64> = Vec::with_capacity(N_UNIFORM + 2 * N_LOG + 2);
    for k in 1..=N_LOG {
        let d = excl * math::powf(10.0, -(k as f64) * 0.5);
        taus.push(d);
        taus.push(len - d);
    }
    for i in 0..=N_UNIFORM {
        taus.push(excl + (len - 2.0 * excl) * i as f64 / N_UNIFORM as f64);
    }
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let gap = |tau: f64| curve.inside_gap(chord.reflect(curve.point_at(start + tau)));
    let noise = 1e-13 * diam;
    let mut last: Option<(f64, f64)> = None;
    let mut brackets: Vec<(f64, f64, f64)> = Vec::new();
    for &tau in &taus {
        let g = gap(tau);
        if g.abs() <= noise {
            continue;
        }
        if let Some((lt, lg)) = last {
            if (lg > 0.0) != (g > 0.0) {
                brackets.push((lt, tau, lg));
            }
        }
        last = Some((tau, g));
    }
    if last.is_none() {
        return Err(HingeError::TangentialIntersection { angle: 0.0 });
    }
    match brackets.len() {
        0 => return Err(HingeError::NoIntersection),
        1 => {}
        count => return Err(HingeError::MultipleIntersections { count }),
    }
    let (a, b, ga) = brackets[0];
    let tau = math::bisect(gap, a, b, ga, 1e-13 * diam);
    let far = pair_point(curve, start + tau);
    let near = reflected_partner(curve, chord, far);
    let angle = crossing_angle(curve, chord, &far, &near);
    Ok(assemble(far_side, far, near, angle))
}

/// Limit of the extremal pair at the closed end of a family (chord angle
/// exactly `alpha` or `alpha'`): the far point is where the tangent is
/// parallel to the chord.
pub fn extended_pair(curve: &BoundaryCurve, chord: &Chord, family: Family) -> Result<ExtremalPair, HingeError> {
    let far_side = family.far_side();
    let mut far = None;
    for n in [chord.p.perp(), chord.p.perp_neg()] {
        let m = curve.find_by_normal_angle(n.angle())?;
        let side = if chord.side_value(m.point) < 0.0 { Side::Left } else { Side::Right };
        if side == far_side {
            far = Some(pair_point(curve, m.s));
        }
    }
    let far = far.ok_or(HingeError::NoIntersection)?;
    let near = reflected_partner(curve, chord, far);
    Ok(assemble(far_side, far, near, 0.0))
}

/// Extremal hinge points of a chord in one of the four families, with the
/// strict distance inequality between the far and near hinges enforced.
pub fn extremal_points(curve: &BoundaryCurve, chord: &Chord, family: Family) -> Result<Extremal, HingeError> {
    let pair = extremal_pair(curve, chord, family)?;
    if pair.crossing_angle < 1e-6 {
        return Err(HingeError::TangentialIntersection { angle: pair.crossing_angle });
    }
    let level = family.level();
    let mk = |p: &PairPoint| -> Result<Hinge, HingeError> {
        match hinge_geometry(chord, p.s, p.pt, p.n) {
            Some(h) if h.level == level => Ok(h),
            _ => Err(HingeError::WrongHingeLevel { s: p.s }),
        }
    };
    let h_left = mk(&pair.left)?;
    let h_right = mk(&pair.right)?;
    let (d_far, d_near) = match family.far_side() {
        Side::Left => (h_left.d, h_right.d),
        Side::Right => (h_right.d, h_left.d),
    };
    if !(d_far > d_near) {
        return Err(HingeError::DistanceOrder { d_far, d_near });
    }
    Ok(Extremal {
        a_left: pair.left.pt,
        h_left,
        a_right: pair.right.pt,
        h_right,
        crossing_angle: pair.crossing_angle,
    })
}
