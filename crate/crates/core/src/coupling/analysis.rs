use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{simulate, stats, step_reflected, gaussian_step, path_rng, CouplingError, ExitKind, PathRecord, SimConfig};
use crate::geometry::BoundaryCurve;
use crate::hinges::{SpecialPoints, UPoint};
use crate::lyapunov::LyapunovSet;
use crate::math;
use crate::par;
use crate::vec2::Vec2;

/// Starting pairs whose mirrors sit at chart points pulled from the loop
/// toward its vertex centroid by `shrink` (1 = on the loop), with the
/// two points `2 half_gap` apart across the chord at relative position
/// `along` (0 at `P`, 1 at `Q`).
pub fn start_pairs(
    curve: &BoundaryCurve,
    lset: &LyapunovSet,
    count: usize,
    shrink: f64,
    half_gap: f64,
    along: f64,
) -> Vec<(Vec2, Vec2)> {
    let ring = &lset.ring[..lset.ring.len() - 1];
    let n = ring.len() as f64;
    let c = ring.iter().fold(UPoint::new(0.0, 0.0), |a, p| UPoint::new(a.u1 + p.u1 / n, a.u2 + p.u2 / n));
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let r = ring[k * ring.len() / count];
        let u = UPoint::new(c.u1 + shrink * (r.u1 - c.u1), c.u2 + shrink * (r.u2 - c.u2));
        if !lset.contains(u) {
            continue;
        }
        let Ok(chord) = lset.special.phi_inv(curve, u) else { continue };
        let mid = chord.p_pt + (chord.q_pt - chord.p_pt) * along;
        let (x, y) = (mid - chord.m * half_gap, mid + chord.m * half_gap);
        if curve.contains(x) && curve.contains(y) && lset.pair_in_t(curve, x, y).unwrap_or(false) {
            out.push((x, y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceLevel {
    pub dt: f64,
    pub n_paths: usize,
    pub n_exited: usize,
    pub exit_fraction: f64,
    /// 95% half-width of the exit fraction.
    pub half_width: f64,
    pub outside_exits: usize,
    pub chart_exits: usize,
    pub n_coupled: usize,
    pub mean_zeta: Option<f64>,
    /// Fraction of paths keeping `e1 . (Y - X) > 0` up to coupling.
    pub e1_kept_fraction: f64,
    pub drift: DriftSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub n_starts: usize,
    pub paths_per_start: usize,
    pub levels: Vec<InvarianceLevel>,
    /// Exit fraction strictly decreasing along the ladder, each step
    /// separated by the combined 95% intervals.
    pub decreasing: bool,
    pub mean_zeta: Option<f64>,
}

/// Runs `paths_per_start` coupled paths from every start at every ladder
/// level. Path `j` of start `i` uses generator stream `i * paths_per_start + j`.
pub fn invariance_mc(
    curve: &BoundaryCurve,
    sp: &SpecialPoints,
    lset: &LyapunovSet,
    starts: &[(Vec2, Vec2)],
    ladder: &[SimConfig],
    paths_per_start: usize,
) -> Result<InvarianceReport, CouplingError> {
    let mut levels = Vec::new();
    let jobs: Vec<(usize, usize)> =
        (0..starts.len()).flat_map(|i| (0..paths_per_start).map(move |j| (i, j))).collect();
    for cfg in ladder {
        let cfg = SimConfig { record_stride: 0, stop_at_coupling: true, track_mirror: true, ..*cfg };
        let recs = par::map(&jobs, |&(i, j)| {
            let (x, y) = starts[i];
            simulate(curve, Some(sp), Some(lset), x, y, &cfg, (i * paths_per_start + j) as u64).map(|r| Summary::of(&r))
        });
        let recs: Vec<Summary> = recs.into_iter().collect::<Result<_, _>>()?;
        let n = recs.len();
        let n_exited = recs.iter().filter(|r| r.exit.is_some()).count();
        let zetas: Vec<f64> = recs.iter().filter_map(|r| r.zeta).collect();
        let mut drift = DriftSummary::default();
        for r in &recs {
            drift.add(&r.drift);
        }
        levels.push(InvarianceLevel {
            dt: cfg.dt,
            n_paths: n,
            n_exited,
            exit_fraction: n_exited as f64 / n as f64,
            half_width: stats::binomial_half_width(n_exited, n),
            outside_exits: recs.iter().filter(|r| r.exit == Some(ExitKind::Outside)).count(),
            chart_exits: recs.iter().filter(|r| r.exit == Some(ExitKind::ChartUndefined)).count(),
            n_coupled: zetas.len(),
            mean_zeta: (!zetas.is_empty()).then(|| zetas.iter().sum::<f64>() / zetas.len() as f64),
            e1_kept_fraction: recs.iter().filter(|r| r.e1_kept).count() as f64 / n as f64,
            drift: drift.finish(),
        });
    }
    let decreasing = levels
        .windows(2)
        .all(|w| stats::separated_above(w[0].n_exited, w[0].n_paths, w[1].n_exited, w[1].n_paths));
    let zs: Vec<f64> = levels.iter().filter_map(|l| l.mean_zeta).collect();
    Ok(InvarianceReport {
        n_starts: starts.len(),
        paths_per_start,
        mean_zeta: (!zs.is_empty()).then(|| zs.iter().sum::<f64>() / zs.len() as f64),
        levels,
        decreasing,
    })
}

struct Summary {
    exit: Option<ExitKind>,
    zeta: Option<f64>,
    e1_kept: bool,
    drift: super::DriftAccum,
}

impl Summary {
    fn of(r: &PathRecord) -> Self {
        Summary { exit: r.exit_kind, zeta: r.zeta, e1_kept: r.e1_order_kept, drift: r.drift }
    }
}

/// Normalized drift residuals: total `|dU - F d|L| - G d|M||` over total
/// `|F d|L| + G d|M||`, and the same for the mirror angle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DriftSummary {
    pub steps: usize,
    pub residual_u: f64,
    pub residual_theta: f64,
    pub interior_moves: usize,
    #[serde(skip)]
    acc: super::DriftAccum,
}

impl DriftSummary {
    fn add(&mut self, a: &super::DriftAccum) {
        self.acc.steps += a.steps;
        self.acc.sum_abs_residual_u += a.sum_abs_residual_u;
        self.acc.sum_abs_predicted_u += a.sum_abs_predicted_u;
        self.acc.sum_abs_residual_theta += a.sum_abs_residual_theta;
        self.acc.sum_abs_predicted_theta += a.sum_abs_predicted_theta;
        self.acc.interior_moves += a.interior_moves;
    }

    fn finish(mut self) -> Self {
        let a = self.acc;
        self.steps = a.steps;
        self.interior_moves = a.interior_moves;
        self.residual_u = if a.sum_abs_predicted_u > 0.0 { a.sum_abs_residual_u / a.sum_abs_predicted_u } else { 0.0 };
        self.residual_theta =
            if a.sum_abs_predicted_theta > 0.0 { a.sum_abs_residual_theta / a.sum_abs_predicted_theta } else { 0.0 };
        self
    }
}

/// Drift residuals of a set of path records.
pub fn drift_diagnostic(records: &[PathRecord]) -> DriftSummary {
    let mut s = DriftSummary::default();
    for r in records {
        s.add(&r.drift);
    }
    s.finish()
}

/// Log-log fit of the drift residuals against the step size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderFit {
    pub dts: Vec<f64>,
    pub residual_u: Vec<f64>,
    pub residual_theta: Vec<f64>,
    pub order_u: f64,
    pub order_theta: f64,
}

impl LadderFit {
    pub fn from_levels(levels: &[InvarianceLevel]) -> Self {
        let dts: Vec<f64> = levels.iter().map(|l| l.dt).collect();
        let ru: Vec<f64> = levels.iter().map(|l| l.drift.residual_u).collect();
        let rt: Vec<f64> = levels.iter().map(|l| l.drift.residual_theta).collect();
        LadderFit {
            order_u: stats::loglog_slope(&dts, &ru),
            order_theta: stats::loglog_slope(&dts, &rt),
            dts,
            residual_u: ru,
            residual_theta: rt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginalKind {
    CouplingX,
    CouplingY,
    /// A reflected Brownian motion driven by its own generator streams.
    Independent,
}

/// Positions at `t_max` of `n_paths` paths of the chosen kind.
pub fn marginal_samples(
    curve: &BoundaryCurve,
    x: Vec2,
    y: Vec2,
    cfg: &SimConfig,
    n_paths: usize,
    kind: MarginalKind,
) -> Result<Vec<Vec2>, CouplingError> {
    let idx: Vec<u64> = (0..n_paths as u64).collect();
    let cfg = SimConfig { record_stride: 0, stop_at_coupling: false, track_mirror: false, ..*cfg };
    let out = par::map(&idx, |&i| -> Result<Vec2, CouplingError> {
        match kind {
            MarginalKind::CouplingX | MarginalKind::CouplingY => {
                let r = simulate(curve, None, None, x, y, &cfg, i)?;
                Ok(if kind == MarginalKind::CouplingX { r.final_state.x } else { r.final_state.y })
            }
            MarginalKind::Independent => {
                // streams disjoint from the coupled runs
                let mut rng = path_rng(cfg.seed, (1u64 << 40) + i);
                let sd = math::sqrt(cfg.dt);
                let mut z = x;
                for _ in 0..math::round(cfg.t_max / cfg.dt) as usize {
                    z = step_reflected(curve, z, gaussian_step(&mut rng, sd))?.x;
                }
                Ok(z)
            }
        }
    });
    out.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub c1_hat: f64,
    pub p1_hat: f64,
    /// Per start: (10th percentile of `V(1)` among survivors, fraction of
    /// all paths surviving with `V(1)` at least that, survivors).
    pub per_start: Vec<(f64, f64, usize)>,
}

/// Empirical separation constants `(c1, p1)`: among paths not coupled by
/// time 1, the 10th percentile of `|X(1) - Y(1)|`, minimized over starts.
pub fn estimate_separation(
    curve: &BoundaryCurve,
    starts: &[(Vec2, Vec2)],
    cfg: &SimConfig,
    n_paths: usize,
) -> Result<Separation, CouplingError> {
    let cfg = SimConfig { t_max: 1.0, record_stride: 0, stop_at_coupling: true, track_mirror: false, ..*cfg };
    let mut per_start = Vec::new();
    for (i, &(x, y)) in starts.iter().enumerate() {
        let idx: Vec<u64> = (0..n_paths as u64).collect();
        let vs = par::map(&idx, |&j| simulate(curve, None, None, x, y, &cfg, (i * n_paths) as u64 + j));
        let vs: Vec<f64> = vs
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|r| r.zeta.is_none())
            .map(|r| r.final_state.v)
            .collect();
        if vs.len() < 100 {
            return Err(CouplingError::InsufficientSurvivors { survivors: vs.len() });
        }
        let c1 = stats::quantile(&vs, 0.1);
        let p1 = vs.iter().filter(|v| **v >= c1).count() as f64 / n_paths as f64;
        per_start.push((c1, p1, vs.len()));
    }
    let c1_hat = per_start.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let p1_hat = per_start.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(Separation { c1_hat, p1_hat, per_start })
}
