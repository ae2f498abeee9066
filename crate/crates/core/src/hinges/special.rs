use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BoundaryScan, Chord, HingeError, HingeKinds, Level, Side};
use crate::geometry::{BoundaryCurve, LineRepr};
use crate::math::{self, PI, TAU};
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub s: f64,
    pub xy: Vec2,
}

impl BoundaryPoint {
    fn at(curve: &BoundaryCurve, s: f64) -> Self {
        let s = curve.wrap(s);
        BoundaryPoint { s, xy: curve.point_at(s) }
    }
}

/// A point of the chart `U = [0, ubar1] x [0, ubar2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UPoint {
    pub u1: f64,
    pub u2: f64,
}

impl UPoint {
    pub fn new(u1: f64, u2: f64) -> Self {
        UPoint { u1, u2 }
    }
}

/// The named points of one sequence (plain or primed).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialRow {
    pub p1: BoundaryPoint,
    pub p3: BoundaryPoint,
    pub p4: BoundaryPoint,
    pub p6: BoundaryPoint,
    pub q1: BoundaryPoint,
    pub q3: BoundaryPoint,
    pub q4: BoundaryPoint,
    pub q6: BoundaryPoint,
    pub p2: Option<BoundaryPoint>,
    pub p5: Option<BoundaryPoint>,
    pub q2: Option<BoundaryPoint>,
    pub q5: Option<BoundaryPoint>,
}

impl SpecialRow {
    /// `(name, point)` pairs of the points that are set.
    pub fn named(&self) -> Vec<(&'static str, BoundaryPoint)> {
        let mut v = alloc::vec![
            ("P1", self.p1),
            ("P3", self.p3),
            ("P4", self.p4),
            ("P6", self.p6),
            ("Q1", self.q1),
            ("Q3", self.q3),
            ("Q4", self.q4),
            ("Q6", self.q6),
        ];
        for (name, p) in [("P2", self.p2), ("P5", self.p5), ("Q2", self.q2), ("Q5", self.q5)] {
            if let Some(p) = p {
                v.push((name, p));
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoints {
    pub alpha: f64,
    pub plain: SpecialRow,
    pub primed: SpecialRow,
    /// Length of the lower boundary part.
    pub ubar1: f64,
    /// Length of the upper boundary part.
    pub ubar2: f64,
    pub total_length: f64,
}

/// The four chord families on which extremal hinge points are defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `P1 < P < P3`, angle in `(alpha, angle(P))`.
    LowerPlain,
    /// `Q4 < Q < Q6`, angle in `(alpha, -angle(Q))`.
    UpperPlain,
    /// `P'3 < P < P'1`, angle in `(angle(P), alpha')`.
    LowerPrime,
    /// `Q'6 < Q < Q'4`, angle in `(-angle(Q), alpha')`.
    UpperPrime,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::LowerPlain, Family::UpperPlain, Family::LowerPrime, Family::UpperPrime];

    pub fn level(self) -> Level {
        match self {
            Family::LowerPlain | Family::LowerPrime => Level::Lower,
            Family::UpperPlain | Family::UpperPrime => Level::Upper,
        }
    }

    /// Side carrying the extremal point away from the pivot endpoint.
    pub fn far_side(self) -> Side {
        match self {
            Family::LowerPlain | Family::UpperPrime => Side::Left,
            Family::UpperPlain | Family::LowerPrime => Side::Right,
        }
    }

    pub fn is_primed(self) -> bool {
        matches!(self, Family::LowerPrime | Family::UpperPrime)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::LowerPlain => "A(P1,P3)",
            Family::UpperPlain => "A(Q4,Q6)",
            Family::LowerPrime => "A(P'1,P'3)",
            Family::UpperPrime => "A(Q'4,Q'6)",
        }
    }

    /// Chord angle minus the normal-line angle at the pivot; it vanishes
    /// when the chord is normal to the boundary at the pivot.
    pub fn deviation(self, curve: &BoundaryCurve, chord: &Chord) -> f64 {
        match self {
            Family::LowerPlain | Family::LowerPrime => chord.angle - normal_angle_at(curve, chord.s_p),
            Family::UpperPlain | Family::UpperPrime => chord.angle - normal_line_angle_at(curve, chord.s_q),
        }
    }
}

/// `angle(P)` in `[0, 2 pi)`.
pub fn normal_angle_at(curve: &BoundaryCurve, s: f64) -> f64 {
    math::rem_pos(curve.normal_one_sided(s).angle(), TAU)
}

/// Angle of the line along `-n(Q)`, in `[0, 2 pi)`.
pub fn normal_line_angle_at(curve: &BoundaryCurve, s: f64) -> f64 {
    math::rem_pos((-curve.normal_one_sided(s)).angle(), TAU)
}

impl SpecialPoints {
    pub fn alpha_prime(&self) -> f64 {
        PI - self.alpha
    }

    fn len(&self) -> f64 {
        self.total_length
    }

    fn fwd(&self, a: f64, b: f64) -> f64 {
        math::rem_pos(b - a, self.len())
    }

    pub fn u1_of_s(&self, s: f64) -> f64 {
        self.fwd(self.plain.p1.s, s)
    }

    pub fn u2_of_s(&self, s: f64) -> f64 {
        self.fwd(s, self.primed.q6.s)
    }

    pub fn s_of_u1(&self, u1: f64) -> f64 {
        math::rem_pos(self.plain.p1.s + u1, self.len())
    }

    pub fn s_of_u2(&self, u2: f64) -> f64 {
        math::rem_pos(self.primed.q6.s - u2, self.len())
    }

    /// On the lower part `[P1, P'1]`, within `tol`.
    pub fn on_lower(&self, s: f64, tol: f64) -> bool {
        let u = self.u1_of_s(s);
        u <= self.ubar1 + tol || u >= self.len() - tol
    }

    /// On the upper part `[Q6, Q'6]` (counterclockwise), within `tol`.
    pub fn on_upper(&self, s: f64, tol: f64) -> bool {
        let u = self.u2_of_s(s);
        u <= self.ubar2 + tol || u >= self.len() - tol
    }

    fn clamp_u(&self, u: f64, ubar: f64) -> f64 {
        if u > ubar {
            // only reachable within the tolerance band around 0
            if u > 0.5 * (ubar + self.len()) {
                0.0
            } else {
                ubar
            }
        } else {
            u
        }
    }

    /// Chart coordinates of a chord whose endpoints lie on the lower and
    /// upper parts of the boundary.
    pub fn phi(&self, chord: &Chord, tol: f64) -> Result<UPoint, HingeError> {
        if !self.on_lower(chord.s_p, tol) || !self.on_upper(chord.s_q, tol) {
            return Err(HingeError::NotAdmissible);
        }
        Ok(UPoint {
            u1: self.clamp_u(self.u1_of_s(chord.s_p), self.ubar1),
            u2: self.clamp_u(self.u2_of_s(chord.s_q), self.ubar2),
        })
    }

    pub fn phi_inv(&self, curve: &BoundaryCurve, u: UPoint) -> Result<Chord, HingeError> {
        let eps = 1e-9 * curve.diameter();
        if !(u.u1 >= -eps && u.u1 <= self.ubar1 + eps && u.u2 >= -eps && u.u2 <= self.ubar2 + eps) {
            return Err(HingeError::NotAdmissible);
        }
        let sp = self.s_of_u1(u.u1);
        let sq = self.s_of_u2(u.u2);
        Ok(Chord::from_parts(sp, sq, curve.point_at(sp), curve.point_at(sq)))
    }

    /// Admissible: endpoints on the two parts and angle in `[alpha, alpha']`.
    pub fn admissible(&self, chord: &Chord, tol: f64) -> bool {
        self.on_lower(chord.s_p, tol)
            && self.on_upper(chord.s_q, tol)
            && chord.angle >= self.alpha - 1e-12
            && chord.angle <= self.alpha_prime() + 1e-12
    }

    /// Strict membership of a chord in a family, with an angular buffer.
    pub fn in_family(&self, curve: &BoundaryCurve, chord: &Chord, family: Family, buffer: f64) -> bool {
        let tol = curve.tolerances().root;
        if !self.on_lower(chord.s_p, tol) || !self.on_upper(chord.s_q, tol) {
            return false;
        }
        let u1 = self.u1_of_s(chord.s_p);
        let u2 = self.u2_of_s(chord.s_q);
        let a = chord.angle;
        match family {
            Family::LowerPlain => {
                u1 > 0.0
                    && u1 < self.u1_of_s(self.plain.p3.s)
                    && a > self.alpha + buffer
                    && a < normal_angle_at(curve, chord.s_p) - buffer
            }
            Family::UpperPlain => {
                u2 > self.u2_of_s(self.plain.q4.s)
                    && u2 < self.ubar2
                    && a > self.alpha + buffer
                    && a < normal_line_angle_at(curve, chord.s_q) - buffer
            }
            Family::LowerPrime => {
                u1 > self.u1_of_s(self.primed.p3.s)
                    && u1 < self.ubar1
                    && a > normal_angle_at(curve, chord.s_p) + buffer
                    && a < self.alpha_prime() - buffer
            }
            Family::UpperPrime => {
                u2 > 0.0
                    && u2 < self.u2_of_s(self.primed.q4.s)
                    && a > normal_line_angle_at(curve, chord.s_q) + buffer
                    && a < self.alpha_prime() - buffer
            }
        }
    }

    /// A chord drawn uniformly from a family: pivot position and angle
    /// fractions in `(0, 1)`.
    pub fn family_chord(&self, curve: &BoundaryCurve, family: Family, fpos: f64, fang: f64) -> Result<Chord, HingeError> {
        let (pivot_s, lo, hi, pivot_is_p) = match family {
            Family::LowerPlain => {
                let s = self.s_of_u1(fpos * self.u1_of_s(self.plain.p3.s));
                (s, self.alpha, normal_angle_at(curve, s), true)
            }
            Family::UpperPlain => {
                let u4 = self.u2_of_s(self.plain.q4.s);
                let s = self.s_of_u2(u4 + fpos * (self.ubar2 - u4));
                (s, self.alpha, normal_line_angle_at(curve, s), false)
            }
            Family::LowerPrime => {
                let u3 = self.u1_of_s(self.primed.p3.s);
                let s = self.s_of_u1(u3 + fpos * (self.ubar1 - u3));
                (s, normal_angle_at(curve, s), self.alpha_prime(), true)
            }
            Family::UpperPrime => {
                let s = self.s_of_u2(fpos * self.u2_of_s(self.primed.q4.s));
                (s, normal_line_angle_at(curve, s), self.alpha_prime(), false)
            }
        };
        let angle = lo + fang * (hi - lo);
        let x = curve.point_at(pivot_s);
        let c = Chord::through(curve, angle, x)?;
        // snap the pivot endpoint to the exact arclength
        Ok(if pivot_is_p {
            Chord::from_parts(pivot_s, c.s_q, x, c.q_pt)
        } else {
            Chord::from_parts(c.s_p, pivot_s, c.p_pt, x)
        })
    }
}

/// Number of boundary samples used by hinge scans.
pub const SCAN_SAMPLES: usize = 2000;

fn lower_intersection(curve: &BoundaryCurve, angle: f64, x: Vec2) -> Result<(f64, f64), HingeError> {
    let h = curve.line_boundary_intersections(&LineRepr::new(angle, x))?;
    Ok((h.s_p, h.s_q))
}

/// Finds the largest arc of lower-boundary points `P` (between `from` and
/// `to`, counterclockwise) whose chord at `angle` is free of the two
/// forbidden hinge types. Returns arclength positions of both ends.
fn hinge_free_arc(
    curve: &BoundaryCurve,
    scan: &BoundaryScan,
    angle: f64,
    from: f64,
    to: f64,
    step: f64,
    forbidden: [(Side, Level); 2],
) -> Result<(f64, f64), HingeError> {
    let span = curve.forward(from, to);
    if span <= 2.0 * step {
        return Err(HingeError::EmptyHingeFreeArc);
    }
    let free = |s: f64| -> bool {
        let x = curve.point_at(s);
        let Ok(h) = curve.line_boundary_intersections(&LineRepr::new(angle, x)) else {
            return false;
        };
        let chord = Chord::from_parts(s, h.s_q, x, h.q);
        let k: HingeKinds = scan.hinge_kinds(curve, &chord);
        forbidden.iter().all(|&(side, level)| k.get(side, level).is_none())
    };
    let n = math::floor(span / step) as usize;
    let pos: Vec<f64> = (1..n).map(|i| from + span * i as f64 / n as f64).collect();
    let flags: Vec<bool> = pos.iter().map(|&s| free(s)).collect();
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < flags.len() {
        if flags[i] {
            let mut j = i;
            while j + 1 < flags.len() && flags[j + 1] {
                j += 1;
            }
            if best.is_none_or(|(a, b)| j - i > b - a) {
                best = Some((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    let (a, b) = best.ok_or(HingeError::EmptyHingeFreeArc)?;
    let tol = curve.tolerances().root;
    let refine = |inside: f64, outside: f64| -> f64 {
        let (mut good, mut bad) = (inside, outside);
        while (good - bad).abs() > tol {
            let mid = 0.5 * (good + bad);
            if free(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let left_out = if a == 0 { from } else { pos[a - 1] };
    let right_out = if b + 1 == pos.len() { from + span } else { pos[b + 1] };
    Ok((refine(pos[a], left_out), refine(pos[b], right_out)))
}

/// Special boundary points for the angle `alpha`.
pub fn compute_special_points(curve: &BoundaryCurve, alpha: f64) -> Result<SpecialPoints, HingeError> {
    assert!(alpha > 0.0 && alpha < 0.5 * PI, "alpha must lie in (0, pi/2)");
    let ap = PI - alpha;
    let at = |s: f64| BoundaryPoint::at(curve, s);

    let p1 = curve.find_by_normal_angle(alpha)?;
    let (_, s_q1) = lower_intersection(curve, alpha, p1.point)?;
    let q6 = curve.find_by_normal_angle(PI + alpha)?;
    let (s_p6, _) = lower_intersection(curve, alpha, q6.point)?;

    let pp1 = curve.find_by_normal_angle(ap)?;
    let (_, s_qp1) = lower_intersection(curve, ap, pp1.point)?;
    let qp6 = curve.find_by_normal_angle(PI + ap)?;
    let (s_pp6, _) = lower_intersection(curve, ap, qp6.point)?;

    let ubar1 = curve.forward(p1.s, pp1.s);
    let scan = BoundaryScan::new(curve, SCAN_SAMPLES);
    let step = ubar1 / SCAN_SAMPLES as f64;

    let (s_p3, s_p4) = hinge_free_arc(
        curve,
        &scan,
        alpha,
        p1.s,
        s_p6,
        step,
        [(Side::Left, Level::Lower), (Side::Right, Level::Upper)],
    )?;
    let (s_pp4, s_pp3) = hinge_free_arc(
        curve,
        &scan,
        ap,
        s_pp6,
        pp1.s,
        step,
        [(Side::Right, Level::Lower), (Side::Left, Level::Upper)],
    )?;
    let top = |angle: f64, s: f64| -> Result<f64, HingeError> { Ok(lower_intersection(curve, angle, curve.point_at(s))?.1) };
    let plain = SpecialRow {
        p1: at(p1.s),
        p3: at(s_p3),
        p4: at(s_p4),
        p6: at(s_p6),
        q1: at(s_q1),
        q3: at(top(alpha, s_p3)?),
        q4: at(top(alpha, s_p4)?),
        q6: at(q6.s),
        p2: None,
        p5: None,
        q2: None,
        q5: None,
    };
    let primed = SpecialRow {
        p1: at(pp1.s),
        p3: at(s_pp3),
        p4: at(s_pp4),
        p6: at(s_pp6),
        q1: at(s_qp1),
        q3: at(top(ap, s_pp3)?),
        q4: at(top(ap, s_pp4)?),
        q6: at(qp6.s),
        p2: None,
        p5: None,
        q2: None,
        q5: None,
    };
    if !((plain.p6.xy - plain.p1.xy).x > 0.0) {
        return Err(HingeError::OrientationViolated("(P6 - P1) . e1 > 0"));
    }
    if !((plain.q6.xy - plain.q1.xy).x > 0.0) {
        return Err(HingeError::OrientationViolated("(Q6 - Q1) . e1 > 0"));
    }
    if !((primed.p6.xy - primed.p1.xy).x < 0.0) {
        return Err(HingeError::OrientationViolated("(P'6 - P'1) . e1 < 0"));
    }
    let ubar2 = curve.forward(q6.s, qp6.s);
    Ok(SpecialPoints { alpha, plain, primed, ubar1, ubar2, total_length: curve.total_length() })
}
