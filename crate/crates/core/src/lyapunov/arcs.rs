use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::LyapunovError;
use crate::geometry::BoundaryCurve;
use crate::hinges::{
    chord_endpoint_dots, extended_pair, extremal_points, field_f_with, field_g_with, Chord, Family, HingeError,
    SpecialPoints, UPoint,
};
use crate::math;
use crate::ode::dopri_step;

/// Samples along each angle-`alpha` arc.
pub const ALPHA_ARC_SAMPLES: usize = 200;
/// Local error tolerance of the arc integration.
pub const ODE_TOL: f64 = 1e-9;
/// Required normality `|p . n + 1|` (or `|p . n - 1|` at a lower pivot) at the end.
pub const TOL_NORMAL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    Plain,
    Primed,
}

/// φ-images of the angle-`alpha` chords between `P3` and `P4` (plain) or
/// angle-`alpha'` chords from `P'3` to `P'4` (primed).
pub fn arc_alpha(curve: &BoundaryCurve, sp: &SpecialPoints, which: Which) -> Result<Vec<UPoint>, LyapunovError> {
    let (angle, s_from, s_to, forward) = match which {
        Which::Plain => (sp.alpha, sp.plain.p3.s, sp.plain.p4.s, true),
        Which::Primed => (sp.alpha_prime(), sp.primed.p3.s, sp.primed.p4.s, false),
    };
    let span = if forward { curve.forward(s_from, s_to) } else { -curve.forward(s_to, s_from) };
    let tol = curve.tolerances().root;
    let mut out = Vec::with_capacity(ALPHA_ARC_SAMPLES);
    for i in 0..ALPHA_ARC_SAMPLES {
        let s = curve.wrap(s_from + span * i as f64 / (ALPHA_ARC_SAMPLES - 1) as f64);
        let x = curve.point_at(s);
        let c = Chord::through(curve, angle, x)?;
        let c = Chord::from_parts(s, c.s_q, x, c.q_pt);
        out.push(sp.phi(&c, tol)?);
    }
    Ok(out)
}

/// Closed end of each family, where the integration starts.
pub fn family_start(sp: &SpecialPoints, family: Family) -> UPoint {
    let row = if family.is_primed() { &sp.primed } else { &sp.plain };
    let (p, q) = match family {
        Family::LowerPlain | Family::LowerPrime => (row.p3, row.q3),
        Family::UpperPlain | Family::UpperPrime => (row.p4, row.q4),
    };
    UPoint::new(sp.u1_of_s(p.s), sp.u2_of_s(q.s))
}

/// Direction of integration in the chart: `+1` when the arc leaves its
/// start with increasing coordinates.
pub fn direction(family: Family) -> f64 {
    match family {
        Family::UpperPlain | Family::LowerPrime => 1.0,
        Family::LowerPlain | Family::UpperPrime => -1.0,
    }
}

/// Open interval of the pivot coordinate (`u1` for lower, `u2` for upper
/// families) on which a family lives.
pub fn pivot_range(sp: &SpecialPoints, family: Family) -> (f64, f64) {
    match family {
        Family::LowerPlain => (0.0, sp.u1_of_s(sp.plain.p3.s)),
        Family::UpperPlain => (sp.u2_of_s(sp.plain.q4.s), sp.ubar2),
        Family::LowerPrime => (sp.u1_of_s(sp.primed.p3.s), sp.ubar1),
        Family::UpperPrime => (0.0, sp.u2_of_s(sp.primed.q4.s)),
    }
}

fn pivot_coord(family: Family, u: UPoint) -> f64 {
    match family.level() {
        crate::hinges::Level::Lower => u.u1,
        crate::hinges::Level::Upper => u.u2,
    }
}

/// Extremal points and their inward normals: `(left, n_left, right, n_right)`.
fn extremal_with_normals(
    curve: &BoundaryCurve,
    chord: &Chord,
    family: Family,
    closed_end: bool,
) -> Result<[crate::vec2::Vec2; 4], HingeError> {
    if closed_end {
        let e = extended_pair(curve, chord, family)?;
        return Ok([e.left.pt, e.left.n, e.right.pt, e.right.n]);
    }
    let e = extremal_points(curve, chord, family)?;
    Ok([
        e.a_left,
        curve.normal_one_sided(e.h_left.s_a),
        e.a_right,
        curve.normal_one_sided(e.h_right.s_a),
    ])
}

/// Right-hand side of the arc equations: `F(X) - G(Y)` with `V = 1`,
/// `X` the left and `Y` the right extremal point. At the closed end of the
/// family the extended extremal pair is used.
pub fn ode_rhs(curve: &BoundaryCurve, sp: &SpecialPoints, u: UPoint, family: Family) -> Result<[f64; 2], LyapunovError> {
    rhs_impl(curve, sp, u, family, false)
}

fn rhs_impl(
    curve: &BoundaryCurve,
    sp: &SpecialPoints,
    u: UPoint,
    family: Family,
    closed_end: bool,
) -> Result<[f64; 2], LyapunovError> {
    let chord = sp.phi_inv(curve, u)?;
    if !closed_end && !sp.in_family(curve, &chord, family, 0.0) {
        return Err(LyapunovError::FamilyViolation { u1: u.u1, u2: u.u2 });
    }
    let (pn_p, pn_q) = chord_endpoint_dots(curve, &chord)?;
    let [x, nx, y, ny] = extremal_with_normals(curve, &chord, family, closed_end)?;
    let f = field_f_with(&chord, pn_p, pn_q, x, nx, 1.0);
    let g = field_g_with(&chord, pn_p, pn_q, y, ny, 1.0);
    Ok([f[0] - g[0], f[1] - g[1]])
}

/// Right-hand side at the closed end of a family (extended extremal pair).
pub fn ode_rhs_closed_end(curve: &BoundaryCurve, sp: &SpecialPoints, family: Family) -> Result<[f64; 2], LyapunovError> {
    rhs_impl(curve, sp, family_start(sp, family), family, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeArc {
    pub family: Family,
    /// Accepted points, starting at the closed end of the family.
    pub points: Vec<UPoint>,
    pub u_end: UPoint,
    pub a_star: f64,
    /// Smallest rhs component seen over accepted steps (start included).
    pub min_rhs: f64,
    /// `|p . n(Q) + 1|` (upper) or `|p . n(P) - 1|` (lower) at the end.
    pub normality: f64,
    pub accepted: usize,
    pub rejected: usize,
}

fn normality(curve: &BoundaryCurve, chord: &Chord, family: Family) -> f64 {
    match family.level() {
        crate::hinges::Level::Upper => (chord.p.dot(curve.normal_one_sided(chord.s_q)) + 1.0).abs(),
        crate::hinges::Level::Lower => (chord.p.dot(curve.normal_one_sided(chord.s_p)) - 1.0).abs(),
    }
}

/// Integrates the arc of a family from its closed end until the chord is
/// normal to the boundary at the pivot endpoint.
pub fn integrate_ode_arc(curve: &BoundaryCurve, sp: &SpecialPoints, family: Family) -> Result<OdeArc, LyapunovError> {
    integrate_with_tol(curve, sp, family, ODE_TOL)
}

pub fn integrate_with_tol(curve: &BoundaryCurve, sp: &SpecialPoints, family: Family, tol: f64) -> Result<OdeArc, LyapunovError> {
    let diam = curve.diameter();
    let sign = direction(family);
    let start = family_start(sp, family);
    let r0 = ode_rhs_closed_end(curve, sp, family)?;
    let mut min_rhs = r0[0].min(r0[1]);
    if !(min_rhs > 0.0) {
        return Err(LyapunovError::RhsNotPositive { u1: start.u1, u2: start.u2, rhs: r0 });
    }
    let mut f = |y: &[f64; 2]| -> Result<[f64; 2], LyapunovError> {
        let r = rhs_impl(curve, sp, UPoint::new(y[0], y[1]), family, false)?;
        Ok([sign * r[0], sign * r[1]])
    };
    let dev_at = |y: &[f64; 2]| -> Option<f64> {
        let c = sp.phi_inv(curve, UPoint::new(y[0], y[1])).ok()?;
        Some(family.deviation(curve, &c))
    };
    let (lo, hi) = pivot_range(sp, family);
    let mut y = [start.u1, start.u2];
    let mut k = [sign * r0[0], sign * r0[1]];
    let dev_sign = match family {
        Family::LowerPlain | Family::UpperPlain => -1.0,
        Family::LowerPrime | Family::UpperPrime => 1.0,
    };
    let mut points = alloc::vec![start];
    let mut a = 0.0;
    let mut h = 1e-3 * diam;
    let h_min = 1e-13 * diam;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let dev_stop = 1e-10;
    loop {
        if a > 10.0 * diam {
            return Err(LyapunovError::NoTermination { a });
        }
        if h < h_min {
            break;
        }
        let step = dopri_step(&mut f, &y, &k, h);
        let Ok((yn, err, kn)) = step else {
            // stage left the family or the extremal search failed: the event
            // lies within this step
            h *= 0.5;
            rejected += 1;
            continue;
        };
        let en = err[0].abs().max(err[1].abs());
        if en > tol {
            h *= (0.9 * math::powf(tol / en, 0.2)).max(0.2);
            rejected += 1;
            continue;
        }
        let un = UPoint::new(yn[0], yn[1]);
        let pc = pivot_coord(family, un);
        let dev = match dev_at(&yn) {
            Some(d) if d * dev_sign > 0.0 && pc > lo && pc < hi => d,
            _ => {
                h *= 0.5;
                rejected += 1;
                continue;
            }
        };
        let r = [sign * kn[0], sign * kn[1]];
        let m = r[0].min(r[1]);
        if !(m > 0.0) {
            return Err(LyapunovError::RhsNotPositive { u1: un.u1, u2: un.u2, rhs: r });
        }
        min_rhs = min_rhs.min(m);
        y = yn;
        k = kn;
        a += h;
        accepted += 1;
        points.push(un);
        if dev.abs() < dev_stop {
            break;
        }
        let grow = if en > 0.0 { 0.9 * math::powf(tol / en, 0.2) } else { 5.0 };
        h *= grow.clamp(1.0, 5.0);
    }
    let u_end = UPoint::new(y[0], y[1]);
    let chord = sp.phi_inv(curve, u_end)?;
    let nrm = normality(curve, &chord, family);
    if nrm > TOL_NORMAL {
        return Err(LyapunovError::NormalityNotReached { residual: nrm });
    }
    let pc = pivot_coord(family, u_end);
    if !(pc > lo && pc < hi) {
        return Err(LyapunovError::OrderingViolated(family.name()));
    }
    Ok(OdeArc { family, points, u_end, a_star: a, min_rhs, normality: nrm, accepted, rejected })
}
