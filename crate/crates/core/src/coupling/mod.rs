//! Euler simulation of the mirror coupling of two reflected Brownian motions.

mod analysis;
mod rng;
pub mod stats;
#[cfg(test)]
mod tests;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use analysis::{
    drift_diagnostic, estimate_separation, invariance_mc, marginal_samples, start_pairs, DriftSummary, InvarianceLevel,
    InvarianceReport, LadderFit, MarginalKind, Separation,
};
pub use rng::{gaussian_step, path_rng};

use crate::geometry::{BoundaryCurve, LineRepr};
use crate::hinges::{field_f_with, field_g_with, Chord, SpecialPoints, UPoint};
use crate::lyapunov::LyapunovSet;
use crate::math;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CouplingError {
    #[error("increment {norm} exceeds a quarter of the diameter")]
    StepTooLarge { norm: f64 },
    #[error("starting points coincide")]
    CoincidentStart,
    #[error("starting point outside the domain")]
    StartOutside,
    #[error("only {survivors} paths survived to time 1")]
    InsufficientSurvivors { survivors: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub eps_couple: f64,
    pub seed: u64,
    /// Record every this many steps (0 records nothing but the endpoints).
    pub record_stride: usize,
    /// Stop at the coupling time instead of running the coupled pair on.
    pub stop_at_coupling: bool,
    /// Track the chart point and the drift residuals.
    pub track_mirror: bool,
}

impl SimConfig {
    /// Defaults for a given step: coupling radius `3 sqrt(dt)`.
    pub fn new(dt: f64, t_max: f64, seed: u64) -> Self {
        SimConfig {
            dt,
            t_max,
            eps_couple: 3.0 * math::sqrt(dt),
            seed,
            record_stride: 0,
            stop_at_coupling: true,
            track_mirror: true,
        }
    }

    fn validate(&self) -> Result<(), CouplingError> {
        if !(self.dt > 0.0 && self.t_max > self.dt && self.eps_couple > 0.0) {
            return Err(CouplingError::BadConfig("need 0 < dt < t_max and eps_couple > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingState {
    pub t: f64,
    pub x: Vec2,
    pub y: Vec2,
    pub m: Vec2,
    pub v: f64,
    /// Unwrapped angle of `p = i m`.
    pub theta: f64,
    pub u: Option<UPoint>,
    pub abs_l: f64,
    pub abs_m: f64,
    pub coupled: bool,
}

/// Result of one projected Euler step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectedStep {
    pub x: Vec2,
    pub dl: f64,
    pub normal: Option<Vec2>,
}

/// Euler step with nearest-point projection onto the closed domain; the
/// projection distance is the local-time increment.
pub fn step_reflected(curve: &BoundaryCurve, x: Vec2, dw: Vec2) -> Result<ReflectedStep, CouplingError> {
    let norm = dw.norm();
    if norm > 0.25 * curve.diameter() {
        return Err(CouplingError::StepTooLarge { norm });
    }
    let z = x + dw;
    if curve.contains(z) {
        return Ok(ReflectedStep { x: z, dl: 0.0, normal: None });
    }
    let foot = curve.nearest_point(z);
    Ok(ReflectedStep { x: foot.point, dl: foot.dist, normal: Some(curve.normal_one_sided(foot.s)) })
}

/// Chord along the perpendicular bisector of `x` and `y`, labeled so that
/// `p = i m` with `m = (y - x) / |y - x|`.
pub fn mirror_chord(curve: &BoundaryCurve, x: Vec2, y: Vec2) -> Option<Chord> {
    let m = (y - x).normalized();
    let p = m.perp();
    let h = curve.line_boundary_intersections(&LineRepr::new(p.angle(), (x + y) * 0.5)).ok()?;
    // the line hits are ordered by e2; flip to match p = i m
    if (h.q - h.p).dot(p) >= 0.0 {
        Some(Chord::from_parts(h.s_p, h.s_q, h.p, h.q))
    } else {
        Some(Chord::from_parts(h.s_q, h.s_p, h.q, h.p))
    }
}

fn chart_point(curve: &BoundaryCurve, sp: &SpecialPoints, chord: &Chord) -> Option<UPoint> {
    if (chord.q_pt - chord.p_pt).y <= 0.0 {
        return None;
    }
    sp.phi(chord, curve.tolerances().close).ok()
}

impl CouplingState {
    pub fn start(curve: &BoundaryCurve, sp: Option<&SpecialPoints>, x: Vec2, y: Vec2) -> Result<Self, CouplingError> {
        let d = y - x;
        let v = d.norm();
        if v <= 0.0 {
            return Err(CouplingError::CoincidentStart);
        }
        if !curve.in_closure(x, curve.tolerances().bd) || !curve.in_closure(y, curve.tolerances().bd) {
            return Err(CouplingError::StartOutside);
        }
        let m = d / v;
        let u = sp.and_then(|sp| mirror_chord(curve, x, y).and_then(|c| chart_point(curve, sp, &c)));
        Ok(CouplingState {
            t: 0.0,
            x,
            y,
            m,
            v,
            theta: math::rem_pos(m.perp().angle(), math::PI),
            u,
            abs_l: 0.0,
            abs_m: 0.0,
            coupled: false,
        })
    }
}

/// Per-step comparison of the chart and angle increments with the drift
/// formulas, accumulated over a path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DriftAccum {
    /// Steps with boundary contact and a defined chart point before and after.
    pub steps: usize,
    pub sum_abs_residual_u: f64,
    pub sum_abs_predicted_u: f64,
    pub sum_abs_residual_theta: f64,
    pub sum_abs_predicted_theta: f64,
    /// Interior steps at which the chart point moved (should stay zero).
    pub interior_moves: usize,
}

/// Result of a coupled step, with the local-time increments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub state: CouplingState,
    pub dl: f64,
    pub dm: f64,
    pub n_x: Option<Vec2>,
    pub n_y: Option<Vec2>,
}

/// One step of the coupled pair: `dZ = dW - 2 m (m . dW)`.
pub fn step_coupling(
    curve: &BoundaryCurve,
    sp: Option<&SpecialPoints>,
    state: &CouplingState,
    dw: Vec2,
    dt: f64,
    eps_couple: f64,
) -> Result<StepOutcome, CouplingError> {
    let mut s = *state;
    s.t += dt;
    let rx = step_reflected(curve, s.x, dw)?;
    if s.coupled {
        s.x = rx.x;
        s.y = rx.x;
        s.abs_l += rx.dl;
        s.abs_m += rx.dl;
        return Ok(StepOutcome { state: s, dl: rx.dl, dm: rx.dl, n_x: rx.normal, n_y: rx.normal });
    }
    let dz = dw - s.m * (2.0 * s.m.dot(dw));
    let ry = step_reflected(curve, s.y, dz)?;
    s.x = rx.x;
    s.y = ry.x;
    s.abs_l += rx.dl;
    s.abs_m += ry.dl;
    let d = s.y - s.x;
    let v = d.norm();
    if v < eps_couple {
        s.coupled = true;
        s.y = s.x;
        s.v = 0.0;
        return Ok(StepOutcome { state: s, dl: rx.dl, dm: ry.dl, n_x: rx.normal, n_y: ry.normal });
    }
    let m = d / v;
    let p_old = state.m.perp();
    let p_new = m.perp();
    s.theta += math::atan2(p_old.cross(p_new), p_old.dot(p_new));
    s.m = m;
    s.v = v;
    if rx.dl > 0.0 || ry.dl > 0.0 {
        s.u = sp.and_then(|sp| mirror_chord(curve, s.x, s.y).and_then(|c| chart_point(curve, sp, &c)));
    }
    Ok(StepOutcome { state: s, dl: rx.dl, dm: ry.dl, n_x: rx.normal, n_y: ry.normal })
}

/// Why a path was flagged as having left the Lyapunov set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExitKind {
    /// The chart point left the set.
    Outside,
    /// The mirror stopped meeting both boundary parts.
    ChartUndefined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub samples: Vec<CouplingState>,
    pub zeta: Option<f64>,
    pub exit_time_from_l: Option<f64>,
    pub exit_kind: Option<ExitKind>,
    /// Whether `e1 . (Y - X) > 0` held at every step before coupling.
    pub e1_order_kept: bool,
    pub drift: DriftAccum,
    pub final_state: CouplingState,
    /// Accumulated `-2 int m . dW`, the martingale part of `V`.
    pub w_bar: f64,
    /// Largest excess of `V` over `V(0) + w_bar` seen along the path.
    pub max_domination_excess: f64,
    pub steps: usize,
}

/// Simulates one coupled path from `(x, y)` with the generator stream `stream`.
pub fn simulate(
    curve: &BoundaryCurve,
    sp: Option<&SpecialPoints>,
    lset: Option<&LyapunovSet>,
    x: Vec2,
    y: Vec2,
    cfg: &SimConfig,
    stream: u64,
) -> Result<PathRecord, CouplingError> {
    cfg.validate()?;
    let mut rng = path_rng(cfg.seed, stream);
    let sd = math::sqrt(cfg.dt);
    let sp_used = if cfg.track_mirror { sp } else { None };
    let mut state = CouplingState::start(curve, sp_used, x, y)?;
    let n_steps = math::round(cfg.t_max / cfg.dt) as usize;
    let mut rec = PathRecord {
        samples: Vec::new(),
        zeta: None,
        exit_time_from_l: None,
        exit_kind: None,
        e1_order_kept: (y - x).x > 0.0,
        drift: DriftAccum::default(),
        final_state: state,
        w_bar: 0.0,
        max_domination_excess: 0.0,
        steps: 0,
    };
    let v0 = state.v;
    if cfg.record_stride > 0 {
        rec.samples.push(state);
    }
    for k in 1..=n_steps {
        let dw = gaussian_step(&mut rng, sd);
        let before = state;
        if !before.coupled {
            rec.w_bar -= 2.0 * before.m.dot(dw);
        }
        let out = step_coupling(curve, sp_used, &before, dw, cfg.dt, cfg.eps_couple)?;
        state = out.state;
        rec.steps = k;
        if !before.coupled {
            if state.coupled {
                rec.zeta = Some(state.t);
            } else {
                rec.max_domination_excess = rec.max_domination_excess.max(state.v - (v0 + rec.w_bar));
                if (state.y - state.x).x <= 0.0 {
                    rec.e1_order_kept = false;
                }
                if sp_used.is_some() {
                    accumulate_drift(curve, &before, dw, &out, &mut rec.drift);
                }
                if let Some(l) = lset {
                    if rec.exit_time_from_l.is_none() && before.u.is_some() {
                        let kind = match state.u {
                            None => Some(ExitKind::ChartUndefined),
                            Some(u) if (out.dl > 0.0 || out.dm > 0.0) && !l.contains(u) => Some(ExitKind::Outside),
                            _ => None,
                        };
                        if kind.is_some() {
                            rec.exit_time_from_l = Some(state.t);
                            rec.exit_kind = kind;
                        }
                    }
                }
            }
        }
        if cfg.record_stride > 0 && (k % cfg.record_stride == 0 || k == n_steps) {
            rec.samples.push(state);
        }
        if state.coupled && cfg.stop_at_coupling {
            break;
        }
    }
    rec.final_state = state;
    Ok(rec)
}

/// Trapezoid-rule prediction of a boundary push from `a` to `b` of one
/// process while the other stays at `o`: `(dU, dtheta)`.
fn push_prediction(curve: &BoundaryCurve, a: Vec2, b: Vec2, o: Vec2, is_x: bool) -> Option<([f64; 2], f64)> {
    let d = (b - a).norm();
    if d == 0.0 {
        return Some(([0.0; 2], 0.0));
    }
    let n = (b - a) / d;
    let mut du = [0.0; 2];
    let mut dth = 0.0;
    for z in [a, b] {
        let (x, y) = if is_x { (z, o) } else { (o, z) };
        let chord = mirror_chord(curve, x, y)?;
        let pn_p = chord.p.dot(curve.normal_one_sided(chord.s_p));
        let pn_q = chord.p.dot(curve.normal_one_sided(chord.s_q));
        let v = (y - x).norm();
        let (f, sgn) = if is_x {
            (field_f_with(&chord, pn_p, pn_q, z, n, v), -1.0)
        } else {
            (field_g_with(&chord, pn_p, pn_q, z, n, v), 1.0)
        };
        du[0] += 0.5 * f[0] * d;
        du[1] += 0.5 * f[1] * d;
        dth += 0.5 * sgn * chord.p.dot(n) * d / v;
    }
    Some((du, dth))
}

fn accumulate_drift(curve: &BoundaryCurve, before: &CouplingState, dw: Vec2, out: &StepOutcome, acc: &mut DriftAccum) {
    let after = &out.state;
    if out.dl == 0.0 && out.dm == 0.0 {
        if before.u != after.u {
            acc.interior_moves += 1;
        }
        return;
    }
    let (Some(u0), Some(u1)) = (before.u, after.u) else { return };
    // X is pushed first with Y at its free position, then Y with X settled
    let x_pre = before.x + dw;
    let y_pre = before.y + dw - before.m * (2.0 * before.m.dot(dw));
    let Some((px, tx)) = push_prediction(curve, x_pre, after.x, y_pre, true) else { return };
    let Some((py, ty)) = push_prediction(curve, y_pre, after.y, after.x, false) else { return };
    let pred = [px[0] + py[0], px[1] + py[1]];
    let dtheta = tx + ty;
    let du = [u1.u1 - u0.u1, u1.u2 - u0.u2];
    acc.steps += 1;
    acc.sum_abs_residual_u += math::hypot(du[0] - pred[0], du[1] - pred[1]);
    acc.sum_abs_predicted_u += math::hypot(pred[0], pred[1]);
    acc.sum_abs_residual_theta += (after.theta - before.theta - dtheta).abs();
    acc.sum_abs_predicted_theta += dtheta.abs();
}
