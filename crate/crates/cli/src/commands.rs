use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use mirror_core::assumptions::{check_all, AssumptionReport, Resolutions, Verdict};
use mirror_core::coupling::{
    invariance_mc, simulate as simulate_path, start_pairs, CouplingError, InvarianceReport, LadderFit, SimConfig,
};
use mirror_core::hinges::{
    compute_special_points, hinge_of, is_active, Chord, HingeError, Level, Side, SpecialPoints, UPoint,
};
use mirror_core::lyapunov::{self, LyapunovError, LyapunovSet};
use mirror_core::spectral::{
    analyze_eigenfunction, eigen_ladder, eigenfunction_error, heat_cross_check, hot_spots, nodal_polyline, Bump,
    EigenReport, EigenfunctionAnalysis, HeatConfig, HotSpots, LadderReport, Locator, Multiplicity, Regions,
    SpectralError, TriMesh,
};
use mirror_core::{BoundaryCurve, GeometryError, Vec2};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::domain::{hex, DomainSpec};
use crate::run::{num, Run};
use crate::svg::{self, EigenLayers};
use crate::{DomainArg, Global};

#[repr(u8)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Code {
    Ok = 0,
    Input = 1,
    Assumption = 2,
    Unresolved = 3,
    Numerical = 4,
}

#[derive(Debug)]
pub struct Fail {
    pub code: Code,
    pub error: anyhow::Error,
}

impl Fail {
    pub fn new(code: Code, error: impl Into<anyhow::Error>) -> Self {
        Fail { code, error: error.into() }
    }

    /// Name of the underlying error variant, or of the exit class.
    pub fn kind(&self) -> String {
        let variant = |d: String| d.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string();
        if let Some(g) = self.error.downcast_ref::<GeometryError>() {
            return variant(format!("{g:?}"));
        }
        if let Some(HingeError::Geometry(g)) = self.error.downcast_ref::<HingeError>() {
            return variant(format!("{g:?}"));
        }
        if let Some(h) = self.error.downcast_ref::<HingeError>() {
            return variant(format!("{h:?}"));
        }
        if self.error.is::<UnknownArtifactKind>() {
            return "UnknownArtifactKind".into();
        }
        format!("{:?}", self.code)
    }
}

pub trait OrFail<T> {
    fn or_code(self, code: Code) -> Result<T, Fail>;
    fn input(self) -> Result<T, Fail>
    where
        Self: Sized,
    {
        self.or_code(Code::Input)
    }
    fn numerical(self) -> Result<T, Fail>
    where
        Self: Sized,
    {
        self.or_code(Code::Numerical)
    }
}

impl<T, E: Into<anyhow::Error>> OrFail<T> for Result<T, E> {
    fn or_code(self, code: Code) -> Result<T, Fail> {
        self.map_err(|e| Fail::new(code, e))
    }
}

pub fn hinge_fail(e: HingeError) -> Fail {
    let code = match e {
        HingeError::Geometry(_) => Code::Input,
        HingeError::EmptyHingeFreeArc | HingeError::OrientationViolated(_) => Code::Assumption,
        _ => Code::Numerical,
    };
    Fail::new(code, e)
}

fn lyapunov_fail(e: LyapunovError) -> Fail {
    match e {
        LyapunovError::Hinge(h) => hinge_fail(h),
        e => Fail::new(Code::Numerical, e),
    }
}

fn coupling_fail(e: CouplingError) -> Fail {
    let code = match e {
        CouplingError::CoincidentStart | CouplingError::StartOutside | CouplingError::BadConfig(_) => Code::Input,
        _ => Code::Numerical,
    };
    Fail::new(code, e)
}

fn spectral_fail(e: SpectralError) -> Fail {
    let code = match e {
        SpectralError::BadMeshSize { .. } | SpectralError::BadEigenCount { .. } | SpectralError::ShortLadder => {
            Code::Input
        }
        SpectralError::MultiplicityUnresolved => Code::Unresolved,
        _ => Code::Numerical,
    };
    Fail::new(code, e)
}

pub fn parse_pair(s: &str) -> Result<Vec2, String> {
    let v: Vec<&str> = s.split(',').collect();
    match v.as_slice() {
        [a, b] => {
            let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
            let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
            Ok(Vec2::new(a, b))
        }
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

pub struct Loaded {
    pub name: String,
    pub spec: DomainSpec,
    pub curve: BoundaryCurve,
    pub alpha: f64,
}

pub fn load(d: &DomainArg) -> Result<Loaded, Fail> {
    let (name, mut spec) = DomainSpec::load(&d.domain).input()?;
    if let Some(a) = d.alpha {
        spec.alpha = a;
    }
    let curve = spec.curve().input()?;
    Ok(Loaded { name, alpha: spec.alpha, spec, curve })
}

fn new_run(g: &Global, command: &str, l: &Loaded, config: Value) -> Result<Run, Fail> {
    Run::new(&g.out_dir, command, &l.name, &l.spec, config, g.seed).input()
}

/// Prints the summary: JSON with `--json`, otherwise the text lines.
pub fn emit(g: &Global, summary: &Value, text: &[String]) {
    if g.json {
        println!("{}", serde_json::to_string_pretty(summary).expect("summary serializes"));
    } else {
        for line in text {
            println!("{line}");
        }
    }
}

// ---------------------------------------------------------------- validate

pub fn validate(g: &Global, d: &DomainArg) -> Result<Code, Fail> {
    let l = load(d)?;
    let c = &l.curve;
    let summary = json!({
        "valid": true,
        "domain": l.name,
        "domain_hash": l.spec.hash(),
        "pieces": c.piece_count(),
        "total_length": c.total_length(),
        "diameter": c.diameter(),
        "area": c.area(),
        "corners": c.corners(),
        "alpha": l.alpha,
    });
    emit(
        g,
        &summary,
        &[format!(
            "{}: valid, {} pieces, length {:.6}, diameter {:.6}, area {:.6}, {} corners",
            l.name,
            c.piece_count(),
            c.total_length(),
            c.diameter(),
            c.area(),
            c.corners().len()
        )],
    );
    Ok(Code::Ok)
}

// ---------------------------------------------------------- special points

#[derive(Args, Debug, Clone)]
pub struct SpecialArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    /// Also scan the chord between these boundary arclengths for hinges.
    #[arg(long, value_parser = parse_pair, value_name = "S_A,S_B")]
    pub scan_chord: Option<Vec2>,
    #[arg(long, default_value_t = 2000)]
    pub scan_samples: usize,
}

#[derive(Serialize, Deserialize)]
pub struct SpecialData {
    pub domain: DomainSpec,
    pub points: Value,
    pub special: SpecialPoints,
}

pub fn special_stage(run: &mut Run, l: &Loaded) -> Result<SpecialPoints, Fail> {
    let sp = compute_special_points(&l.curve, l.alpha).map_err(hinge_fail)?;
    let mut points = serde_json::Map::new();
    for (row, mark) in [(&sp.plain, ""), (&sp.primed, "'")] {
        for (name, p) in row.named() {
            points.insert(format!("{name}{mark}"), json!({ "xy": p.xy, "s": p.s }));
        }
    }
    let data = SpecialData { domain: l.spec.clone(), points: Value::Object(points), special: sp };
    run.write_json("special-points.json", "special-points", &data).numerical()?;
    run.write_svg("special-points.svg", svg::domain_figure(&l.curve, Some(&sp))).numerical()?;
    Ok(sp)
}

fn scan_rows(curve: &BoundaryCurve, chord: &Chord, n: usize) -> Result<Vec<Vec<String>>, Fail> {
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let s = curve.total_length() * (i as f64 + 0.5) / n as f64;
        let active = match is_active(curve, chord, s) {
            Ok(a) => a,
            Err(HingeError::OnMirror { .. }) => continue,
            Err(e) => return Err(hinge_fail(e)),
        };
        let h = if active { hinge_of(curve, chord, s).map_err(hinge_fail)? } else { None };
        let (side, level, d) = match h {
            Some(h) => (
                if h.side == Side::Left { "left" } else { "right" },
                if h.level == Level::Upper { "upper" } else { "lower" },
                num(h.d),
            ),
            None => ("", "", String::new()),
        };
        rows.push(vec![num(s), (active as u8).to_string(), side.into(), level.into(), d]);
    }
    Ok(rows)
}

pub fn special_points(g: &Global, a: &SpecialArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    let mut run = new_run(g, "special-points", &l, json!({ "alpha": l.alpha, "scan_chord": a.scan_chord, "scan_samples": a.scan_samples }))?;
    let sp = special_stage(&mut run, &l)?;
    if let Some(s) = a.scan_chord {
        let chord = Chord::from_arclengths(&l.curve, s.x, s.y);
        let rows = scan_rows(&l.curve, &chord, a.scan_samples)?;
        run.write_csv("hinges.csv", &["s_A", "active", "side", "level", "d"], &rows).numerical()?;
    }
    run.finish().numerical()?;
    let mut text = vec![format!("alpha {:.6}, lower part {:.6}, upper part {:.6}", sp.alpha, sp.ubar1, sp.ubar2)];
    for (row, mark) in [(&sp.plain, ""), (&sp.primed, "'")] {
        for (name, p) in row.named() {
            text.push(format!("{name}{mark:1} ({:9.5}, {:9.5})  s = {:.6}", p.xy.x, p.xy.y, p.s));
        }
    }
    emit(g, &serde_json::to_value(sp).expect("serializes"), &text);
    Ok(Code::Ok)
}

// ------------------------------------------------------------- assumptions

#[derive(Args, Debug, Clone)]
pub struct AssumptionArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    /// Double every sampling resolution.
    #[arg(long)]
    pub doubled: bool,
}

pub fn assumption_code(rep: &AssumptionReport) -> Code {
    if rep.any_fail() {
        Code::Assumption
    } else if rep.all_pass() {
        Code::Ok
    } else {
        Code::Unresolved
    }
}

fn verdict_word(v: &Verdict) -> String {
    match v {
        Verdict::Pass => "pass".into(),
        Verdict::Fail(w) => format!("fail ({})", w.detail),
        Verdict::Skipped { reason } => format!("skipped ({reason})"),
    }
}

pub fn assumptions_stage(run: &mut Run, l: &Loaded, res: &Resolutions) -> Result<AssumptionReport, Fail> {
    let rep = check_all(&l.curve, l.alpha, res).map_err(hinge_fail)?;
    run.write_json("assumptions.json", "assumptions", &rep).numerical()?;
    Ok(rep)
}

pub fn check_assumptions(g: &Global, a: &AssumptionArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    let res = if a.doubled { Resolutions::default().doubled() } else { Resolutions::default() };
    let mut run = new_run(g, "check-assumptions", &l, json!({ "alpha": l.alpha, "resolutions": res }))?;
    let rep = assumptions_stage(&mut run, &l, &res)?;
    run.finish().numerical()?;
    let mut text: Vec<String> = rep.verdicts().iter().map(|(n, v)| format!("{n}: {}", verdict_word(v))).collect();
    if let Some(nu) = rep.nu_found {
        text.push(format!("nu found: {nu}"));
    }
    emit(g, &serde_json::to_value(&rep).expect("serializes"), &text);
    Ok(assumption_code(&rep))
}

// ---------------------------------------------------------------- lyapunov

#[derive(Serialize, Deserialize)]
pub struct LyapunovData {
    pub domain: DomainSpec,
    pub set: LyapunovSet,
}

pub fn lyapunov_stage(run: &mut Run, l: &Loaded, sp: &SpecialPoints) -> Result<LyapunovSet, Fail> {
    let lset = lyapunov::assemble(&l.curve, sp).map_err(lyapunov_fail)?;
    let data = LyapunovData { domain: l.spec.clone(), set: lset.clone() };
    run.write_json("lyapunov.json", "lyapunov", &data).numerical()?;
    run.write_svg("lyapunov.svg", svg::loop_figure(&lset.ring, &[])).numerical()?;
    Ok(lset)
}

fn lyapunov_text(lset: &LyapunovSet) -> Vec<String> {
    let c = &lset.corners;
    let mut text = vec![format!(
        "loop of {} points, a* = [{:.6}, {:.6}, {:.6}, {:.6}]",
        lset.ring.len(),
        lset.a_star[0],
        lset.a_star[1],
        lset.a_star[2],
        lset.a_star[3]
    )];
    for (n, u) in [("u2", c.u2), ("u3", c.u3), ("u4", c.u4), ("u5", c.u5), ("u2'", c.u2p), ("u3'", c.u3p), ("u4'", c.u4p), ("u5'", c.u5p)] {
        text.push(format!("{n:4} ({:.6}, {:.6})", u.u1, u.u2));
    }
    for arc in &lset.ode {
        text.push(format!("{:?}: min rhs {:.3e}, normality {:.1e}", arc.family, arc.min_rhs, arc.normality));
    }
    text
}

pub fn lyapunov(g: &Global, d: &DomainArg) -> Result<Code, Fail> {
    let l = load(d)?;
    let mut run = new_run(g, "lyapunov", &l, json!({ "alpha": l.alpha }))?;
    let sp = compute_special_points(&l.curve, l.alpha).map_err(hinge_fail)?;
    let lset = lyapunov_stage(&mut run, &l, &sp)?;
    run.finish().numerical()?;
    let summary = json!({ "a_star": lset.a_star, "corners": lset.corners, "ring_points": lset.ring.len() });
    emit(g, &summary, &lyapunov_text(&lset));
    Ok(Code::Ok)
}

// ---------------------------------------------------------------- simulate

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-1,0.2")]
    pub x: Vec2,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,-0.3")]
    pub y: Vec2,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// Record every this many steps.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Coupling radius (default 3 sqrt(dt)).
    #[arg(long)]
    pub eps: Option<f64>,
    /// CSV name; with several paths the index is appended.
    #[arg(long, default_value = "simulate.csv")]
    pub out: String,
}

pub const PATH_COLUMNS: [&str; 12] =
    ["t", "Xx", "Xy", "Yx", "Yy", "V", "theta", "u1", "u2", "absL", "absM", "coupled"];

pub fn simulate(g: &Global, a: &SimulateArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    if a.paths == 0 || a.stride == 0 {
        return Err(Fail::new(Code::Input, anyhow!("--paths and --stride must be positive")));
    }
    // the chart point needs the special points and the loop; without them
    // the coupling still runs, with empty u columns
    let sp = compute_special_points(&l.curve, l.alpha).ok();
    let lset = sp.as_ref().and_then(|sp| lyapunov::assemble(&l.curve, sp).ok());
    let mut cfg = SimConfig::new(a.dt, a.tmax, g.seed);
    if let Some(e) = a.eps {
        cfg.eps_couple = e;
    }
    cfg.record_stride = a.stride;
    cfg.stop_at_coupling = false;
    cfg.track_mirror = sp.is_some();
    let mut run = new_run(g, "simulate", &l, json!({ "alpha": l.alpha, "x": a.x, "y": a.y, "config": cfg, "paths": a.paths }))?;
    let mut summaries = Vec::new();
    for k in 0..a.paths {
        let rec = simulate_path(&l.curve, sp.as_ref(), lset.as_ref(), a.x, a.y, &cfg, k as u64).map_err(coupling_fail)?;
        let rows: Vec<Vec<String>> = rec
            .samples
            .iter()
            .map(|s| {
                let (u1, u2) = s.u.map(|u| (num(u.u1), num(u.u2))).unwrap_or_default();
                vec![
                    num(s.t),
                    num(s.x.x),
                    num(s.x.y),
                    num(s.y.x),
                    num(s.y.y),
                    num(s.v),
                    num(s.theta),
                    u1,
                    u2,
                    num(s.abs_l),
                    num(s.abs_m),
                    (s.coupled as u8).to_string(),
                ]
            })
            .collect();
        let name = if a.paths == 1 { a.out.clone() } else { indexed(&a.out, k) };
        run.write_csv(&name, &PATH_COLUMNS, &rows).numerical()?;
        summaries.push(json!({
            "path": k,
            "csv": name,
            "coupling_time": rec.zeta,
            "exit_time": rec.exit_time_from_l,
            "exit_kind": rec.exit_kind,
            "steps": rec.steps,
        }));
    }
    run.write_json("simulate.json", "simulate", &summaries).numerical()?;
    run.finish().numerical()?;
    let text: Vec<String> = summaries
        .iter()
        .map(|s| format!("path {}: coupling time {}, exit {}", s["path"], s["coupling_time"], s["exit_kind"]))
        .collect();
    emit(g, &Value::Array(summaries), &text);
    Ok(Code::Ok)
}

fn indexed(name: &str, k: usize) -> String {
    match name.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}-{k:04}.{ext}"),
        None => format!("{name}-{k:04}"),
    }
}

// -------------------------------------------------------------- invariance

#[derive(Args, Debug, Clone)]
pub struct InvarianceArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    /// Time steps, coarse to fine.
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3")]
    pub dts: Vec<f64>,
    /// Paths per start.
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    /// Number of starts, half near each chord end.
    #[arg(long, default_value_t = 10)]
    pub starts: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.05)]
    pub half_gap: f64,
    /// Pull of the start chart points toward the loop centre (1 = on the loop).
    #[arg(long, default_value_t = 1.0)]
    pub shrink: f64,
    /// Chart paths drawn over the loop.
    #[arg(long, default_value_t = 4)]
    pub overlay: usize,
}

#[derive(Serialize, Deserialize)]
pub struct InvarianceData {
    pub report: InvarianceReport,
    pub fit: Option<LadderFit>,
    pub starts: Vec<(Vec2, Vec2)>,
    pub ring: Vec<UPoint>,
    pub overlay: Vec<Vec<UPoint>>,
}

pub fn invariance_stage(
    run: &mut Run,
    l: &Loaded,
    sp: &SpecialPoints,
    lset: &LyapunovSet,
    a: &InvarianceArgs,
    seed: u64,
) -> Result<InvarianceData, Fail> {
    if a.dts.is_empty() || a.paths == 0 || a.starts < 2 {
        return Err(Fail::new(Code::Input, anyhow!("need at least one dt, one path and two starts")));
    }
    let half = a.starts / 2;
    let mut starts = start_pairs(&l.curve, lset, half, a.shrink, a.half_gap, 0.03);
    starts.extend(start_pairs(&l.curve, lset, a.starts - half, a.shrink, a.half_gap, 0.97));
    if starts.is_empty() {
        return Err(Fail::new(Code::Input, anyhow!("no admissible starting pairs")));
    }
    let ladder: Vec<SimConfig> = a.dts.iter().map(|&dt| SimConfig::new(dt, a.tmax, seed)).collect();
    let report = invariance_mc(&l.curve, sp, lset, &starts, &ladder, a.paths).map_err(coupling_fail)?;
    let fit = (report.levels.len() >= 2).then(|| LadderFit::from_levels(&report.levels));
    let last = *ladder.last().unwrap();
    let cfg = SimConfig {
        record_stride: ((a.tmax / last.dt) / 1000.0).max(1.0) as usize,
        stop_at_coupling: true,
        ..last
    };
    let mut overlay = Vec::new();
    for (i, &(x, y)) in starts.iter().take(a.overlay).enumerate() {
        let rec = simulate_path(&l.curve, Some(sp), Some(lset), x, y, &cfg, i as u64 * a.paths as u64)
            .map_err(coupling_fail)?;
        overlay.push(rec.samples.iter().filter_map(|s| s.u).collect());
    }
    let data = InvarianceData { report, fit, starts, ring: lset.ring.clone(), overlay };
    run.write_json("invariance.json", "invariance", &data).numerical()?;
    run.write_svg("invariance.svg", svg::loop_figure(&data.ring, &data.overlay)).numerical()?;
    Ok(data)
}

pub fn invariance_text(d: &InvarianceData) -> Vec<String> {
    let mut text: Vec<String> = d
        .report
        .levels
        .iter()
        .map(|l| {
            format!(
                "dt {:.0e}: {}/{} exits ({} outside, {} chart), {} coupled, drift residuals {:.2e}/{:.2e}",
                l.dt, l.n_exited, l.n_paths, l.outside_exits, l.chart_exits, l.n_coupled, l.drift.residual_u, l.drift.residual_theta
            )
        })
        .collect();
    text.push(format!("strictly decreasing: {}", d.report.decreasing));
    if let Some(f) = &d.fit {
        text.push(format!("fitted drift orders: dU {:.2}, theta {:.2}", f.order_u, f.order_theta));
    }
    text
}

pub fn invariance(g: &Global, a: &InvarianceArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    let sp = compute_special_points(&l.curve, l.alpha).map_err(hinge_fail)?;
    let lset = lyapunov::assemble(&l.curve, &sp).map_err(lyapunov_fail)?;
    let mut run = new_run(
        g,
        "invariance",
        &l,
        json!({ "alpha": l.alpha, "dts": a.dts, "paths": a.paths, "starts": a.starts, "tmax": a.tmax,
                "half_gap": a.half_gap, "shrink": a.shrink, "overlay": a.overlay }),
    )?;
    let d = invariance_stage(&mut run, &l, &sp, &lset, a, g.seed)?;
    run.finish().numerical()?;
    emit(g, &json!({ "report": d.report, "fit": d.fit }), &invariance_text(&d));
    Ok(Code::Ok)
}

// ------------------------------------------------------------ eigen/analyze

#[derive(Args, Debug, Clone)]
pub struct EigenArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    /// Coarsest mesh size; each further level halves it.
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Eigenpairs per level, the constant mode included.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Write the finest second eigenfunction as CSV (x, y, psi).
    #[arg(long)]
    pub vectors: bool,
    /// Pairs sampled for the monotonicity check.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Angular tolerance of the gradient cone, radians.
    #[arg(long, default_value_t = 0.01)]
    pub tol_angle: f64,
}

pub type Solved = Vec<(TriMesh, EigenReport)>;

pub fn ladder_sizes(h: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|i| h / (1u64 << i) as f64).collect()
}

pub fn eigen_stage(run: &mut Run, l: &Loaded, a: &EigenArgs) -> Result<(LadderReport, Solved), Fail> {
    let hs = ladder_sizes(a.h, a.levels);
    let (rep, solved) = eigen_ladder(&l.curve, &hs, a.k).map_err(spectral_fail)?;
    run.write_json("eigen.json", "eigen", &rep).numerical()?;
    if a.vectors {
        let (mesh, r) = solved.last().unwrap();
        let rows: Vec<Vec<String>> = mesh
            .vertices
            .iter()
            .zip(&r.vectors[1])
            .map(|(p, v)| vec![num(p.x), num(p.y), num(*v)])
            .collect();
        run.write_csv("eigen-psi.csv", &["x", "y", "psi"], &rows).numerical()?;
    }
    Ok((rep, solved))
}

fn verdict_code(m: Multiplicity) -> Code {
    if m == Multiplicity::Unresolved {
        Code::Unresolved
    } else {
        Code::Ok
    }
}

fn eigen_text(rep: &LadderReport) -> Vec<String> {
    let mut text: Vec<String> = rep
        .levels
        .iter()
        .map(|l| {
            let mu: Vec<String> = l.mu.iter().skip(1).map(|m| format!("{m:.6}")).collect();
            format!("h {}: {} vertices, min angle {:.1} deg, mu {}", l.h, l.n_vertices, l.min_angle_deg, mu.join(" "))
        })
        .collect();
    for p in &rep.pairs {
        text.push(format!(
            "({}, {}): mu2 {:.6} +- {:.1e}, mu3 {:.6}, gap {:.3e} +- {:.1e} -> {:?}",
            p.h_coarse, p.h_fine, p.mu2, p.mu2_error, p.mu3, p.gap_ratio, p.gap_error, p.verdict
        ));
    }
    text.push(format!("verdict {:?}, stable {}", rep.verdict, rep.stable));
    text
}

pub fn eigen(g: &Global, a: &EigenArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    let mut run = new_run(g, "eigen", &l, json!({ "h": a.h, "levels": a.levels, "k": a.k, "vectors": a.vectors }))?;
    let (rep, solved) = eigen_stage(&mut run, &l, a)?;
    let (mesh, r) = solved.last().unwrap();
    let ef = function_data(&l, None, mesh, r, None);
    run.write_json("eigenfunction.json", "eigenfunction", &ef).numerical()?;
    run.finish().numerical()?;
    emit(g, &serde_json::to_value(&rep).expect("serializes"), &eigen_text(&rep));
    Ok(verdict_code(rep.verdict))
}

/// Everything needed to redraw the second eigenfunction.
#[derive(Serialize, Deserialize)]
pub struct EigenfunctionData {
    pub domain: DomainSpec,
    pub special: Option<SpecialPoints>,
    pub mu2: f64,
    pub hot_spots: HotSpots,
    pub nodal: Vec<[Vec2; 2]>,
    pub analysis: Option<EigenfunctionAnalysis>,
    pub mesh: TriMesh,
    pub psi: Vec<f64>,
}

fn function_data(
    l: &Loaded,
    sp: Option<&SpecialPoints>,
    mesh: &TriMesh,
    r: &EigenReport,
    analysis: Option<EigenfunctionAnalysis>,
) -> EigenfunctionData {
    let psi = r.vectors[1].clone();
    EigenfunctionData {
        domain: l.spec.clone(),
        special: sp.copied(),
        mu2: r.mu[1],
        hot_spots: hot_spots(mesh, &psi),
        nodal: nodal_polyline(mesh, &psi),
        analysis,
        mesh: mesh.clone(),
        psi,
    }
}

pub fn eigenfunction_svg(curve: &BoundaryCurve, d: &EigenfunctionData) -> svg::Svg {
    let regions = d.special.as_ref().map(Regions::new);
    let layers = EigenLayers {
        regions: regions.as_ref(),
        violating: d.analysis.as_ref().map(|a| a.cone.violating.as_slice()).unwrap_or(&[]),
        nodal: &d.nodal,
        argmax: d.hot_spots.argmax,
        argmin: d.hot_spots.argmin,
    };
    let mut s = svg::eigen_figure(curve, &d.mesh, &d.psi, &layers);
    s.caption(&format!("mu2 = {:.6}, h = {}", d.mu2, d.mesh.h));
    s
}

#[derive(Serialize, Deserialize)]
pub struct AnalyzeSummary {
    pub h: f64,
    pub multiplicity: Multiplicity,
    pub tol_mono: Option<f64>,
    pub hot_spots: HotSpots,
    /// Monotonicity, sign and cone checks; absent without a loop.
    pub analysis: Option<AnalysisCounts>,
    pub skipped: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct AnalysisCounts {
    pub monotone_fraction: f64,
    pub monotone_sign: f64,
    pub sign_violating_fraction: f64,
    pub cone_fraction: f64,
    pub cone_triangles: usize,
    pub nodal_points_in_regions: usize,
}

pub fn analyze_stage(
    run: &mut Run,
    l: &Loaded,
    geometry: Option<(&SpecialPoints, &LyapunovSet)>,
    rep: &LadderReport,
    solved: &Solved,
    a: &EigenArgs,
    seed: u64,
) -> Result<AnalyzeSummary, Fail> {
    let (mesh, r) = solved.last().unwrap();
    let (analysis, tol, skipped) = match geometry {
        Some((sp, lset)) => {
            if solved.len() < 2 {
                return Err(Fail::new(Code::Input, anyhow!("the analysis needs at least two mesh levels")));
            }
            let (coarse, rc) = &solved[solved.len() - 2];
            let loc = Locator::new(mesh);
            let tol = eigenfunction_error(coarse, &rc.vectors[1], mesh, &loc, &r.vectors[1]);
            let an = analyze_eigenfunction(
                &l.curve, sp, lset, mesh, &r.vectors[1], rep.verdict, tol, a.tol_angle, a.pairs, seed,
            )
            .map_err(spectral_fail)?;
            (Some(an), Some(tol), None)
        }
        None => (None, None, Some("no loop for this domain: hot spots and nodal line only".to_string())),
    };
    let counts = analysis.as_ref().map(|an| AnalysisCounts {
        monotone_fraction: an.monotonicity.fraction,
        monotone_sign: an.monotonicity.sign,
        sign_violating_fraction: an.sign.violating_fraction,
        cone_fraction: an.cone.fraction,
        cone_triangles: an.cone.n_triangles,
        nodal_points_in_regions: an.nodal_in_regions,
    });
    let ef = function_data(l, geometry.map(|g| g.0), mesh, r, analysis);
    run.write_json("eigenfunction.json", "eigenfunction", &ef).numerical()?;
    run.write_svg("analyze.svg", eigenfunction_svg(&l.curve, &ef)).numerical()?;
    let summary = AnalyzeSummary {
        h: mesh.h,
        multiplicity: rep.verdict,
        tol_mono: tol,
        hot_spots: ef.hot_spots.clone(),
        analysis: counts,
        skipped,
    };
    run.write_json("analyze.json", "analyze", &summary).numerical()?;
    Ok(summary)
}

pub fn analyze_text(s: &AnalyzeSummary) -> Vec<String> {
    let mut text = vec![format!(
        "h {}: multiplicity {:?}, max on boundary {}, min on boundary {}",
        s.h, s.multiplicity, s.hot_spots.max_on_boundary, s.hot_spots.min_on_boundary
    )];
    match &s.analysis {
        Some(c) => text.push(format!(
            "monotone {:.4} (tol {:.1e}), sign violations {:.4}, cone {:.4} of {} triangles, nodal points in side regions {}",
            c.monotone_fraction,
            s.tol_mono.unwrap_or(0.0),
            c.sign_violating_fraction,
            c.cone_fraction,
            c.cone_triangles,
            c.nodal_points_in_regions
        )),
        None => text.push(s.skipped.clone().unwrap_or_default()),
    }
    text
}

pub fn analyze(g: &Global, a: &EigenArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    let mut run = new_run(
        g,
        "analyze",
        &l,
        json!({ "alpha": l.alpha, "h": a.h, "levels": a.levels, "k": a.k, "pairs": a.pairs, "tol_angle": a.tol_angle }),
    )?;
    let sp = compute_special_points(&l.curve, l.alpha).ok();
    let lset = sp.as_ref().and_then(|sp| lyapunov::assemble(&l.curve, sp).ok());
    let (rep, solved) = eigen_stage(&mut run, &l, a)?;
    if rep.verdict == Multiplicity::Unresolved {
        run.finish().numerical()?;
        emit(g, &serde_json::to_value(&rep).expect("serializes"), &eigen_text(&rep));
        return Ok(Code::Unresolved);
    }
    let geometry = sp.as_ref().zip(lset.as_ref());
    let s = analyze_stage(&mut run, &l, geometry, &rep, &solved, a, g.seed)?;
    run.finish().numerical()?;
    emit(g, &serde_json::to_value(&s).expect("serializes"), &analyze_text(&s));
    Ok(Code::Ok)
}

// -------------------------------------------------------------- heat check

#[derive(Args, Debug, Clone)]
pub struct HeatArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Coarse mesh size; the fine level uses h/2 and dt/4.
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt_fem: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt_mc: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    /// Centre of the initial bump.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0.5,0.3")]
    pub center: Vec2,
    #[arg(long, default_value_t = 0.8)]
    pub radius: f64,
    /// Evaluation points separated by ';'.
    #[arg(
        long,
        value_parser = parse_pair,
        value_delimiter = ';',
        allow_hyphen_values = true,
        default_value = "0.5,0.3;-1,0;1.5,0.5;0,1.2;0.3,-1"
    )]
    pub points: Vec<Vec2>,
}

pub fn heat_check(g: &Global, a: &HeatArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    if let Some(p) = a.points.iter().find(|p| !l.curve.contains(**p)) {
        return Err(Fail::new(Code::Input, anyhow!("evaluation point ({}, {}) is outside the domain", p.x, p.y)));
    }
    let cfg = HeatConfig {
        bump: Bump { center: a.center, radius: a.radius, amplitude: 1.0 },
        t: a.t,
        h: a.h,
        dt_fem: a.dt_fem,
        dt_mc: a.dt_mc,
        mc_paths: a.paths,
        seed: g.seed,
    };
    let mut run = new_run(g, "heat-check", &l, serde_json::to_value(&cfg).expect("serializes"))?;
    let rows = heat_cross_check(&l.curve, &a.points, &cfg).map_err(spectral_fail)?;
    run.write_json("heat-check.json", "heat-check", &rows).numerical()?;
    run.finish().numerical()?;
    let text: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "({:5.2}, {:5.2}): fem {:.5} mc {:.5} +- {:.1e}, mesh error {:.1e}, {}",
                r.x.x,
                r.x.y,
                r.fem,
                r.mc,
                r.mc_stderr,
                r.mesh_error,
                if r.agrees { "agrees" } else { "DISAGREES" }
            )
        })
        .collect();
    emit(g, &serde_json::to_value(&rows).expect("serializes"), &text);
    Ok(if rows.iter().all(|r| r.agrees) { Code::Ok } else { Code::Numerical })
}

// -------------------------------------------------------------------- plot

#[derive(Args, Debug, Clone)]
pub struct PlotArgs {
    /// A JSON artifact or a simulation CSV.
    pub artifact: PathBuf,
    /// Output SVG (default: the artifact name with .svg in the output directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Loop artifact drawn under a simulation CSV.
    #[arg(long)]
    pub lyapunov: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
#[error("unknown artifact kind {0:?}")]
pub struct UnknownArtifactKind(pub String);

fn read_json(path: &PathBuf) -> Result<Value, Fail> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).input()?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).input()
}

fn data_of<T: for<'de> Deserialize<'de>>(doc: &Value) -> Result<T, Fail> {
    serde_json::from_value(doc["data"].clone()).context("artifact data does not match its kind").input()
}

fn curve_of(spec: &DomainSpec) -> Result<BoundaryCurve, Fail> {
    spec.curve().input()
}

/// Chart points from the u1/u2 columns of a simulation CSV.
fn csv_chart_path(path: &PathBuf) -> Result<Vec<UPoint>, Fail> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).input()?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let header = rd.headers().input()?.clone();
    let col = |n: &str| header.iter().position(|h| h == n).ok_or_else(|| Fail::new(Code::Input, anyhow!("CSV has no {n} column")));
    let (i1, i2) = (col("u1")?, col("u2")?);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.input()?;
        if let (Ok(a), Ok(b)) = (rec[i1].parse::<f64>(), rec[i2].parse::<f64>()) {
            out.push(UPoint::new(a, b));
        }
    }
    Ok(out)
}

pub fn plot(g: &Global, a: &PlotArgs) -> Result<Code, Fail> {
    let bytes = std::fs::read(&a.artifact).with_context(|| format!("reading {}", a.artifact.display())).input()?;
    let hash = {
        use sha2::{Digest, Sha256};
        hex(&Sha256::digest(&bytes))
    };
    let is_csv = a.artifact.extension().is_some_and(|e| e == "csv");
    let (kind, figure) = if is_csv {
        let path = csv_chart_path(&a.artifact)?;
        let ring = match &a.lyapunov {
            Some(p) => data_of::<LyapunovData>(&read_json(p)?)?.set.ring,
            None => Vec::new(),
        };
        ("coupling-csv".to_string(), svg::loop_figure(&ring, &[path]))
    } else {
        let doc = read_json(&a.artifact)?;
        let kind = doc["kind"].as_str().unwrap_or_default().to_string();
        let fig = match kind.as_str() {
            "special-points" => {
                let d: SpecialData = data_of(&doc)?;
                svg::domain_figure(&curve_of(&d.domain)?, Some(&d.special))
            }
            "lyapunov" => svg::loop_figure(&data_of::<LyapunovData>(&doc)?.set.ring, &[]),
            "invariance" => {
                let d: InvarianceData = data_of(&doc)?;
                svg::loop_figure(&d.ring, &d.overlay)
            }
            "eigenfunction" => {
                let d: EigenfunctionData = data_of(&doc)?;
                eigenfunction_svg(&curve_of(&d.domain)?, &d)
            }
            _ => return Err(Fail::new(Code::Input, UnknownArtifactKind(kind))),
        };
        (kind, fig)
    };
    let out = a.out.clone().unwrap_or_else(|| {
        let stem = a.artifact.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
        g.out_dir.join(format!("{stem}.svg"))
    });
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    let name = out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot.svg".into());
    let mut run = Run::with_hash(&dir, "plot", &a.artifact.display().to_string(), hash, json!({ "kind": kind, "out": name }), g.seed)
        .input()?;
    run.write_svg(&name, figure).numerical()?;
    run.finish().numerical()?;
    emit(g, &json!({ "kind": kind, "svg": out }), &[format!("{kind} -> {}", out.display())]);
    Ok(Code::Ok)
}
