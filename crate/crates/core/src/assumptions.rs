//! Sampled checks of the five geometric assumptions, with witnesses.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryCurve, LineRepr};
use crate::hinges::{
    compute_special_points, extremal_pair, hinge_geometry, normal_angle_at, normal_line_angle_at, BoundaryScan,
    Chord, Family, HingeError, Level, Side, SpecialPoints,
};
use crate::math::{self, PI};
use crate::par;
use crate::vec2::Vec2;

/// Sampling resolutions. Defaults follow the documented knobs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolutions {
    /// Positions x angles per family for the activity check.
    pub a1_grid: usize,
    /// Boundary samples on the far side per chord.
    pub a1_scan: usize,
    pub a2_positions: usize,
    pub a2_nu_step: f64,
    pub a2_nu_max: f64,
    /// Positions x angles per family for the hinge-type and crossing checks.
    pub family_grid: usize,
    /// Chords per family in the pairwise intersection check.
    pub a5_grid: usize,
    pub hinge_samples: usize,
    /// Angular margin excluding the equality cases.
    pub buffer: f64,
}

impl Default for Resolutions {
    fn default() -> Self {
        Resolutions {
            a1_grid: 50,
            a1_scan: 200,
            a2_positions: 50,
            a2_nu_step: 0.001,
            a2_nu_max: 0.05,
            family_grid: 20,
            a5_grid: 20,
            hinge_samples: 2000,
            buffer: 1e-6,
        }
    }
}

impl Resolutions {
    /// Every resolution doubled.
    pub fn doubled(&self) -> Self {
        Resolutions {
            a1_grid: 2 * self.a1_grid,
            a1_scan: 2 * self.a1_scan,
            a2_positions: 2 * self.a2_positions,
            a2_nu_step: 0.5 * self.a2_nu_step,
            family_grid: 2 * self.family_grid,
            a5_grid: 2 * self.a5_grid,
            hinge_samples: 2 * self.hinge_samples,
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub chord: Chord,
    /// Offending boundary point, if any.
    pub point: Option<Vec2>,
    /// Second chord for pairwise checks.
    pub other: Option<Chord>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(Witness),
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub alpha: f64,
    pub a1: Verdict,
    pub a2: Verdict,
    pub a3: Verdict,
    pub a4: Verdict,
    pub a5: Verdict,
    /// Largest sampled margin for Assumption 2 (plain and primed together).
    pub nu_found: Option<f64>,
    pub resolutions: Resolutions,
}

impl AssumptionReport {
    pub fn verdicts(&self) -> [(&'static str, &Verdict); 5] {
        [("a1", &self.a1), ("a2", &self.a2), ("a3", &self.a3), ("a4", &self.a4), ("a5", &self.a5)]
    }
    pub fn all_pass(&self) -> bool {
        self.verdicts().iter().all(|(_, v)| v.is_pass())
    }
    pub fn any_fail(&self) -> bool {
        self.verdicts().iter().any(|(_, v)| v.is_fail())
    }
}

/// The chord through the boundary point at `s` with the given angle, with
/// the pivot snapped to that point.
fn pivot_chord(curve: &BoundaryCurve, s: f64, angle: f64, pivot_is_p: bool) -> Option<Chord> {
    let x = curve.point_at(s);
    let h = curve.line_boundary_intersections(&LineRepr::new(angle, x)).ok()?;
    let (sp, sq, p, q) = if pivot_is_p { (s, h.s_q, x, h.q) } else { (h.s_p, s, h.p, x) };
    if curve.forward(sp, sq).min(curve.forward(sq, sp)) <= curve.tolerances().close {
        return None;
    }
    Some(Chord::from_parts(sp, sq, p, q))
}

fn frac(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// First point of the given side whose reflection lands in the closed
/// domain, from a uniform scan of that side.
fn first_active(curve: &BoundaryCurve, chord: &Chord, side: Side, n: usize) -> Option<Vec2> {
    let (start, len) = match side {
        Side::Right => (chord.s_p, curve.forward(chord.s_p, chord.s_q)),
        Side::Left => (chord.s_q, curve.forward(chord.s_q, chord.s_p)),
    };
    let tol = curve.tolerances().bd;
    (1..=n).find_map(|i| {
        let a = curve.point_at(start + len * i as f64 / (n + 1) as f64);
        if chord.side_value(a).abs() <= tol {
            return None;
        }
        (curve.inside_gap(chord.reflect(a)) >= -tol).then_some(a)
    })
}

fn first_fail(results: Vec<Option<Witness>>) -> Verdict {
    match results.into_iter().flatten().next() {
        Some(w) => Verdict::Fail(w),
        None => Verdict::Pass,
    }
}

fn angle_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| if n == 1 { lo } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 })
}

/// Assumption 1: beyond the normal angle at the pivot no point on the far
/// side is active.
pub fn check_a1(curve: &BoundaryCurve, sp: &SpecialPoints, res: &Resolutions) -> Verdict {
    let n = res.a1_grid;
    let b = res.buffer;
    let tol = curve.tolerances().root;
    let mut jobs: Vec<(Family, usize)> = Vec::new();
    for fam in Family::ALL {
        for i in 0..n {
            jobs.push((fam, i));
        }
    }
    let out = par::map(&jobs, |&(fam, i)| {
        let (s, pivot_is_p, lo, hi, side) = match fam {
            Family::LowerPlain => {
                let s = sp.s_of_u1(frac(i, n) * sp.u1_of_s(sp.plain.p3.s));
                (s, true, normal_angle_at(curve, s) + b, sp.alpha_prime(), Side::Right)
            }
            Family::UpperPlain => {
                let u4 = sp.u2_of_s(sp.plain.q4.s);
                let s = sp.s_of_u2(u4 + frac(i, n) * (sp.ubar2 - u4));
                (s, false, normal_line_angle_at(curve, s) + b, sp.alpha_prime(), Side::Left)
            }
            Family::LowerPrime => {
                let u3 = sp.u1_of_s(sp.primed.p3.s);
                let s = sp.s_of_u1(u3 + frac(i, n) * (sp.ubar1 - u3));
                (s, true, sp.alpha, normal_angle_at(curve, s) - b, Side::Left)
            }
            Family::UpperPrime => {
                let s = sp.s_of_u2(frac(i, n) * sp.u2_of_s(sp.primed.q4.s));
                (s, false, sp.alpha, normal_line_angle_at(curve, s) - b, Side::Right)
            }
        };
        if hi < lo {
            return None;
        }
        for angle in angle_grid(lo, hi, n) {
            let Some(c) = pivot_chord(curve, s, angle, pivot_is_p) else { continue };
            if !sp.admissible(&c, tol) {
                continue;
            }
            if let Some(a) = first_active(curve, &c, side, res.a1_scan) {
                return Some(Witness {
                    chord: c,
                    point: Some(a),
                    other: None,
                    detail: format!("{}: active point on the {:?} side", fam.name(), side),
                });
            }
        }
        None
    });
    first_fail(out)
}

/// The hinge types forbidden near the angle-`alpha` arc (plain) or the
/// angle-`alpha'` arc (primed).
fn forbidden(primed: bool) -> [(Side, Level); 2] {
    if primed {
        [(Side::Right, Level::Lower), (Side::Left, Level::Upper)]
    } else {
        [(Side::Left, Level::Lower), (Side::Right, Level::Upper)]
    }
}

/// Assumption 2: returns the verdict and the largest grid margin `nu` for
/// which every sampled chord in `P3 < P < P4` with angle in
/// `[alpha - nu, alpha]` (and the primed analogue) is free of the two
/// forbidden hinge types.
pub fn check_a2(curve: &BoundaryCurve, sp: &SpecialPoints, res: &Resolutions) -> (Verdict, f64) {
    let scan = BoundaryScan::new(curve, res.hinge_samples);
    let steps = math::round(res.a2_nu_max / res.a2_nu_step) as usize;
    let mut nu_found = f64::INFINITY;
    let mut witness = None;
    for primed in [false, true] {
        let (s0, s1, angle0, dir) = if primed {
            (sp.primed.p4.s, sp.primed.p3.s, sp.alpha_prime(), 1.0)
        } else {
            (sp.plain.p3.s, sp.plain.p4.s, sp.alpha, -1.0)
        };
        let span = curve.forward(s0, s1);
        let positions: Vec<f64> = (0..res.a2_positions).map(|i| s0 + span * frac(i, res.a2_positions)).collect();
        let bad = forbidden(primed);
        // first grid index at which some position fails
        let first_bad = par::map(&positions, |&s| {
            for k in 0..=steps {
                let angle = angle0 + dir * k as f64 * res.a2_nu_step;
                let Some(c) = pivot_chord(curve, s, angle, true) else { return Some((k, None)) };
                let kinds = scan.hinge_kinds(curve, &c);
                if let Some(h) = bad.iter().find_map(|&(side, level)| kinds.get(side, level)) {
                    return Some((k, Some((c, h))));
                }
            }
            None
        });
        let worst = first_bad.into_iter().flatten().min_by_key(|(k, _)| *k);
        let nu = match worst {
            None => res.a2_nu_max,
            Some((k, w)) => {
                if k == 0 || witness.is_none() {
                    if let Some((c, h)) = w {
                        witness = Some(Witness {
                            chord: c,
                            point: Some(h.a),
                            other: None,
                            detail: format!("{:?} {:?} hinge at angle offset {}", h.level, h.side, k as f64 * res.a2_nu_step),
                        });
                    }
                }
                (k as f64 - 1.0) * res.a2_nu_step
            }
        };
        nu_found = nu_found.min(nu);
    }
    if nu_found >= res.a2_nu_step {
        (Verdict::Pass, nu_found)
    } else {
        let w = witness.expect("a failing grid point carries a chord");
        (Verdict::Fail(w), nu_found.max(0.0))
    }
}

/// Chords sampled from a family on a `grid x grid` lattice.
fn family_samples(curve: &BoundaryCurve, sp: &SpecialPoints, fam: Family, grid: usize) -> Vec<Chord> {
    let mut v = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            if let Ok(c) = sp.family_chord(curve, fam, frac(i, grid), frac(j, grid)) {
                v.push(c);
            }
        }
    }
    v
}

/// Assumption 3: required and excluded hinge types on each family.
pub fn check_a3(curve: &BoundaryCurve, sp: &SpecialPoints, res: &Resolutions) -> Verdict {
    let scan = BoundaryScan::new(curve, res.hinge_samples);
    let mut jobs = Vec::new();
    for fam in Family::ALL {
        for c in family_samples(curve, sp, fam, res.family_grid) {
            jobs.push((fam, c));
        }
    }
    let out = par::map(&jobs, |(fam, c)| {
        let (need, exclude) = match fam {
            Family::LowerPlain => ((Side::Left, Level::Lower), (Side::Right, Level::Upper)),
            Family::UpperPlain => ((Side::Right, Level::Upper), (Side::Left, Level::Lower)),
            Family::LowerPrime => ((Side::Right, Level::Lower), (Side::Left, Level::Upper)),
            Family::UpperPrime => ((Side::Left, Level::Upper), (Side::Right, Level::Lower)),
        };
        let k = scan.hinge_kinds(curve, c);
        if let Some(h) = k.get(exclude.0, exclude.1) {
            return Some(Witness {
                chord: *c,
                point: Some(h.a),
                other: None,
                detail: format!("{}: excluded {:?} {:?} hinge present", fam.name(), exclude.1, exclude.0),
            });
        }
        if k.get(need.0, need.1).is_none() {
            return Some(Witness {
                chord: *c,
                point: None,
                other: None,
                detail: format!("{}: no {:?} {:?} hinge", fam.name(), need.1, need.0),
            });
        }
        None
    });
    first_fail(out)
}

fn a4_chord(curve: &BoundaryCurve, c: &Chord, fam: Family) -> Option<Witness> {
    let fail = |detail: String, point: Option<Vec2>| Some(Witness { chord: *c, point, other: None, detail });
    let pair = match extremal_pair(curve, c, fam) {
        Ok(p) => p,
        Err(e) => return fail(format!("{}: {e}", fam.name()), None),
    };
    if pair.crossing_angle < 1e-6 {
        return fail(format!("{}: tangential crossing ({:.3e})", fam.name(), pair.crossing_angle), Some(pair.left.pt));
    }
    for p in [pair.left, pair.right] {
        match hinge_geometry(c, p.s, p.pt, p.n) {
            Some(h) if h.level == fam.level() => {}
            _ => return fail(format!("{}: tangent misses the {:?} ray", fam.name(), fam.level()), Some(p.pt)),
        }
    }
    None
}

/// Assumption 4: unique nontangential crossing whose tangents meet the
/// family's ray.
pub fn check_a4(curve: &BoundaryCurve, sp: &SpecialPoints, res: &Resolutions) -> Verdict {
    let mut jobs = Vec::new();
    for fam in Family::ALL {
        for c in family_samples(curve, sp, fam, res.family_grid) {
            jobs.push((fam, c));
        }
    }
    first_fail(par::map(&jobs, |(fam, c)| a4_chord(curve, c, *fam)))
}

/// Assumption 5: lines of the paired families meet inside the closed domain.
pub fn check_a5(curve: &BoundaryCurve, sp: &SpecialPoints, res: &Resolutions) -> Verdict {
    let tol = curve.tolerances().bd;
    let mut out = Vec::new();
    for (fa, fb) in [(Family::LowerPlain, Family::UpperPrime), (Family::LowerPrime, Family::UpperPlain)] {
        let a = family_samples(curve, sp, fa, res.a5_grid);
        let b = family_samples(curve, sp, fb, res.a5_grid);
        out.extend(par::map(&a, |ca| {
            b.iter().find_map(|cb| {
                let fail = |detail: String, point: Option<Vec2>| {
                    Some(Witness { chord: *ca, point, other: Some(*cb), detail })
                };
                let denom = ca.p.cross(cb.p);
                if denom.abs() < 1e-14 {
                    return fail(format!("{} and {}: parallel lines", fa.name(), fb.name()), None);
                }
                let t = (cb.p_pt - ca.p_pt).cross(cb.p) / denom;
                let x = ca.p_pt + ca.p * t;
                if !curve.in_closure(x, tol) {
                    return fail(format!("{} and {}: lines meet outside", fa.name(), fb.name()), Some(x));
                }
                None
            })
        }));
    }
    first_fail(out)
}

/// Witness for a domain without a hinge-free arc: the angle-`alpha` chord
/// through the middle of the lower candidate arc and a forbidden hinge.
fn empty_arc_witness(curve: &BoundaryCurve, alpha: f64, res: &Resolutions) -> Option<Witness> {
    let p1 = curve.find_by_normal_angle(alpha).ok()?;
    let q6 = curve.find_by_normal_angle(PI + alpha).ok()?;
    let p6 = curve.line_boundary_intersections(&LineRepr::new(alpha, q6.point)).ok()?;
    let scan = BoundaryScan::new(curve, res.hinge_samples);
    let span = curve.forward(p1.s, p6.s_p);
    (1..64).find_map(|i| {
        let c = pivot_chord(curve, p1.s + span * i as f64 / 64.0, alpha, true)?;
        let k = scan.hinge_kinds(curve, &c);
        let h = k.lower_left.or(k.upper_right)?;
        Some(Witness {
            chord: c,
            point: Some(h.a),
            other: None,
            detail: format!("no hinge-free arc: {:?} {:?} hinge", h.level, h.side),
        })
    })
}

/// Crossing check on the candidate family `P1 < P < P6`,
/// `alpha < angle < angle(P)`, used when the hinge-free arc is missing.
fn a4_candidate(curve: &BoundaryCurve, alpha: f64, res: &Resolutions) -> Verdict {
    let Ok(p1) = curve.find_by_normal_angle(alpha) else {
        return Verdict::Skipped { reason: "no point with normal angle alpha".into() };
    };
    let Ok(q6) = curve.find_by_normal_angle(PI + alpha) else {
        return Verdict::Skipped { reason: "no point with normal angle pi + alpha".into() };
    };
    let Ok(p6) = curve.line_boundary_intersections(&LineRepr::new(alpha, q6.point)) else {
        return Verdict::Skipped { reason: "P6 undefined".into() };
    };
    let span = curve.forward(p1.s, p6.s_p);
    let g = res.family_grid;
    for i in 0..g {
        let s = p1.s + span * frac(i, g);
        let top = normal_angle_at(curve, s);
        for j in 0..g {
            let angle = alpha + (top - alpha) * frac(j, g);
            let Some(c) = pivot_chord(curve, s, angle, true) else { continue };
            if let Some(w) = a4_chord(curve, &c, Family::LowerPlain) {
                return Verdict::Fail(w);
            }
        }
    }
    Verdict::Pass
}

/// Runs all five checks.
pub fn check_all(curve: &BoundaryCurve, alpha: f64, res: &Resolutions) -> Result<AssumptionReport, HingeError> {
    let sp = match compute_special_points(curve, alpha) {
        Ok(sp) => sp,
        Err(HingeError::EmptyHingeFreeArc) => {
            let skip = || Verdict::Skipped { reason: "special points undefined: no hinge-free arc".into() };
            // the angle-alpha chord itself carries a forbidden hinge, so the
            // margin statement fails at nu = 0 as well
            let (a1, a2, nu) = match empty_arc_witness(curve, alpha, res) {
                Some(w) => (Verdict::Fail(w.clone()), Verdict::Fail(w), Some(0.0)),
                None => (skip(), skip(), None),
            };
            return Ok(AssumptionReport {
                alpha,
                a1,
                a2,
                a3: skip(),
                a4: a4_candidate(curve, alpha, res),
                a5: skip(),
                nu_found: nu,
                resolutions: *res,
            });
        }
        Err(e) => return Err(e),
    };
    check_with_points(curve, &sp, res)
}

/// Runs all five checks against precomputed special points.
pub fn check_with_points(curve: &BoundaryCurve, sp: &SpecialPoints, res: &Resolutions) -> Result<AssumptionReport, HingeError> {
    let (a2, nu) = check_a2(curve, sp, res);
    Ok(AssumptionReport {
        alpha: sp.alpha,
        a1: check_a1(curve, sp, res),
        a2,
        a3: check_a3(curve, sp, res),
        a4: check_a4(curve, sp, res),
        a5: check_a5(curve, sp, res),
        nu_found: Some(nu),
        resolutions: *res,
    })
}

