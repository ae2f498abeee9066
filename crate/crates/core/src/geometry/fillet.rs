use alloc::vec::Vec;

use super::{BoundaryCurve, BoundaryPiece, GeometryError};
use crate::math;

/// Replaces every corner by an inscribed tangent circular arc of radius `rho`.
pub fn fillet_smooth(curve: &BoundaryCurve, rho: f64) -> Result<BoundaryCurve, GeometryError> {
    let n = curve.pieces.len();
    let shortest = curve.pieces.iter().map(|p| p.length).fold(f64::INFINITY, f64::min);
    if !(rho > 0.0) || rho >= 0.5 * shortest {
        return Err(GeometryError::RhoTooLarge { rho, limit: 0.5 * shortest });
    }
    // parameter windows kept on each piece
    let mut keep: Vec<(f64, f64)> = curve.pieces.iter().map(|p| (p.t0, p.t1)).collect();
    let mut arcs: Vec<Option<BoundaryPiece>> = alloc::vec![None; n];
    for k in 0..n {
        if curve.joint_turn[k] <= 1e-9 {
            continue;
        }
        let ia = (k + n - 1) % n;
        let a = &curve.pieces[ia];
        let b = &curve.pieces[k];
        let turn = curve.joint_turn[k];
        for p in [a, b] {
            let kmax = (0..=32)
                .map(|j| p.geo.curvature(p.t0 + (p.t1 - p.t0) * j as f64 / 32.0))
                .fold(0.0, f64::max);
            if rho * kmax >= 1.0 {
                return Err(GeometryError::RhoTooLarge { rho, limit: 1.0 / kmax });
            }
        }
        // initial guess from the straight-corner picture
        let back = rho * math::tan(0.5 * turn);
        let mut ta = a.t_of_s((a.length - back).max(0.0));
        let mut tb = b.t_of_s(back.min(b.length));
        let offset = |p: &super::Piece, t: f64| p.geo.eval(t) + p.unit_tangent(t).perp() * rho;
        let mut converged = false;
        for _ in 0..100 {
            let f = offset(a, ta) - offset(b, tb);
            if f.norm() <= 1e-14 * curve.diameter {
                converged = true;
                break;
            }
            let ja = a.unit_tangent(ta) * (a.geo.speed(ta) * (1.0 - rho * a.geo.curvature(ta)));
            let jb = -(b.unit_tangent(tb) * (b.geo.speed(tb) * (1.0 - rho * b.geo.curvature(tb))));
            let det = ja.cross(jb);
            if det.abs() < 1e-300 {
                break;
            }
            // solve [ja jb] (da, db) = -f
            let da = -f.cross(jb) / det;
            let db = -ja.cross(f) / det;
            ta += da;
            tb += db;
            if da.abs() + db.abs() < 1e-16 {
                converged = true;
                break;
            }
        }
        if !converged || ta <= a.t0 || tb >= b.t1 {
            return Err(GeometryError::RhoTooLarge { rho, limit: 0.5 * shortest });
        }
        keep[ia].1 = ta;
        keep[k].0 = tb;
        let o = offset(a, ta);
        let from = (a.geo.eval(ta) - o).angle();
        let ta_dir = a.unit_tangent(ta);
        let tb_dir = b.unit_tangent(tb);
        let sweep = math::atan2(ta_dir.cross(tb_dir), ta_dir.dot(tb_dir));
        arcs[k] = Some(BoundaryPiece::CircleArc { center: o, radius: rho, from, to: from + sweep });
    }
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        if let Some(arc) = arcs[k] {
            out.push(arc);
        }
        let (t0, t1) = keep[k];
        if t1 <= t0 {
            return Err(GeometryError::RhoTooLarge { rho, limit: 0.5 * shortest });
        }
        out.push(curve.pieces[k].geo.restricted(t0, t1));
    }
    BoundaryCurve::with_tolerances(out, curve.tol)
}
