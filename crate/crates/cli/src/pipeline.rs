//! All stages in sequence with one manifest and a summary table.

use clap::Args;
use mirror_core::assumptions::Resolutions;
use mirror_core::spectral::Multiplicity;
use serde::Serialize;
use serde_json::json;

use crate::commands::{
    analyze_stage, assumption_code, assumptions_stage, eigen_stage, invariance_stage, load, lyapunov_stage,
    special_stage, Code, EigenArgs, Fail, InvarianceArgs, OrFail,
};
use crate::run::Run;
use crate::{DomainArg, Global};

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub domain: DomainArg,
    /// Coarsest mesh size of the eigenvalue ladder.
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Time steps of the invariance ladder.
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3")]
    pub dts: Vec<f64>,
    /// Invariance paths per start.
    #[arg(long, default_value_t = 50)]
    pub paths: usize,
    #[arg(long, default_value_t = 10)]
    pub starts: usize,
    /// Pairs sampled for the monotonicity check.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Serialize)]
struct StageRow {
    stage: &'static str,
    status: Status,
    detail: String,
}

pub fn pipeline(g: &Global, a: &PipelineArgs) -> Result<Code, Fail> {
    let l = load(&a.domain)?;
    let config = json!({
        "alpha": l.alpha, "h": a.h, "levels": a.levels, "dts": a.dts, "paths": a.paths,
        "starts": a.starts, "pairs": a.pairs,
    });
    let mut run = Run::new(&g.out_dir, "pipeline", &l.name, &l.spec, config, g.seed).input()?;
    let mut rows: Vec<StageRow> = Vec::new();
    let mut code = Code::Ok;
    let mut row = |stage, status, detail: String| rows.push(StageRow { stage, status, detail });

    let c = &l.curve;
    row(
        "validate",
        Status::Pass,
        format!("{} pieces, length {:.6}, diameter {:.6}", c.piece_count(), c.total_length(), c.diameter()),
    );

    // soft failures (assumption class) skip the dependent stages; anything
    // else stops the pipeline
    let sp = match special_stage(&mut run, &l) {
        Ok(sp) => {
            row("special-points", Status::Pass, format!("P1 ({:.4}, {:.4})", sp.plain.p1.xy.x, sp.plain.p1.xy.y));
            Some(sp)
        }
        Err(f) if f.code == Code::Assumption => {
            row("special-points", Status::Fail, format!("{:#}", f.error));
            code = code.max(Code::Assumption);
            None
        }
        Err(f) => return Err(f),
    };

    let rep = assumptions_stage(&mut run, &l, &Resolutions::default())?;
    let ac = assumption_code(&rep);
    let words: Vec<String> = rep
        .verdicts()
        .iter()
        .map(|(n, v)| format!("{n} {}", if v.is_pass() { "pass" } else if v.is_fail() { "fail" } else { "skipped" }))
        .collect();
    row("assumptions", if ac == Code::Ok { Status::Pass } else { Status::Fail }, words.join(", "));
    code = code.max(ac);

    let lset = match (&sp, ac) {
        (Some(sp), Code::Ok) => match lyapunov_stage(&mut run, &l, sp) {
            Ok(ls) => {
                let ode_ok = ls.ode.iter().all(|o| o.min_rhs > 0.0);
                row(
                    "lyapunov",
                    if ode_ok { Status::Pass } else { Status::Fail },
                    format!("{} loop points, a* {:.4?}", ls.ring.len(), ls.a_star),
                );
                Some(ls)
            }
            Err(f) if f.code == Code::Assumption => {
                row("lyapunov", Status::Fail, format!("{:#}", f.error));
                code = code.max(Code::Assumption);
                None
            }
            Err(f) => return Err(f),
        },
        _ => {
            row("lyapunov", Status::Skipped, "assumptions not satisfied".into());
            None
        }
    };

    match (&sp, &lset) {
        (Some(sp), Some(ls)) => {
            let ia = InvarianceArgs {
                domain: a.domain.clone(),
                dts: a.dts.clone(),
                paths: a.paths,
                starts: a.starts,
                tmax: 1.0,
                half_gap: 0.05,
                shrink: 1.0,
                overlay: 4,
            };
            let d = invariance_stage(&mut run, &l, sp, ls, &ia, g.seed)?;
            let last = d.report.levels.last().unwrap();
            let fits = d.fit.as_ref().map(|f| format!(", drift orders {:.2}/{:.2}", f.order_u, f.order_theta)).unwrap_or_default();
            row(
                "invariance",
                if last.exit_fraction <= 0.02 { Status::Pass } else { Status::Fail },
                format!("exit fraction {:.4} at dt {:.0e}{fits}", last.exit_fraction, last.dt),
            );
        }
        _ => row("invariance", Status::Skipped, "no loop".into()),
    }

    let ea = EigenArgs {
        domain: a.domain.clone(),
        h: a.h,
        levels: a.levels,
        k: 3,
        vectors: false,
        pairs: a.pairs,
        tol_angle: 0.01,
    };
    let (ladder, solved) = eigen_stage(&mut run, &l, &ea)?;
    let fin = ladder.pairs.last().unwrap();
    let eig_status = if ladder.verdict == Multiplicity::Unresolved { Status::Fail } else { Status::Pass };
    row(
        "eigen",
        eig_status,
        format!(
            "mu2 {:.6}, mu3 {:.6}, multiplicity {}, stable {}",
            fin.mu2,
            fin.mu3,
            serde_json::to_value(ladder.verdict).unwrap().as_str().unwrap_or_default(),
            ladder.stable
        ),
    );
    if eig_status == Status::Fail {
        code = code.max(Code::Unresolved);
        row("analyze", Status::Skipped, "multiplicity unresolved".into());
    } else {
        let geometry = sp.as_ref().zip(lset.as_ref());
        let s = analyze_stage(&mut run, &l, geometry, &ladder, &solved, &ea, g.seed)?;
        let hs = &s.hot_spots;
        let mut detail = format!("hot spots on boundary {}/{}", hs.max_on_boundary, hs.min_on_boundary);
        let mut ok = true;
        if let Some(c) = &s.analysis {
            detail += &format!(
                ", monotone {:.4}, sign violations {:.4}, cone {:.4}",
                c.monotone_fraction, c.sign_violating_fraction, c.cone_fraction
            );
            ok = c.monotone_fraction >= 0.999 && c.sign_violating_fraction <= 0.001 && c.cone_fraction >= 0.99;
        }
        row("analyze", if ok { Status::Pass } else { Status::Fail }, detail);
    }

    run.write_json("pipeline.json", "pipeline", &json!({ "exit_code": code as u8, "stages": rows })).numerical()?;
    run.finish().numerical()?;
    let text: Vec<String> =
        rows.iter().map(|r| format!("{:<15} {:<8} {}", r.stage, format!("{:?}", r.status).to_lowercase(), r.detail)).collect();
    crate::commands::emit(g, &json!({ "exit_code": code as u8, "stages": rows }), &text);
    Ok(code)
}
