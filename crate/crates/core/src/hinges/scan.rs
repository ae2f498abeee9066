use alloc::vec::Vec;

use super::{hinge_geometry, Chord, Hinge, Level, Side};
use crate::geometry::BoundaryCurve;
use crate::math;
use crate::vec2::Vec2;

/// Which hinge types occur for a chord, with one witness each.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HingeKinds {
    pub lower_left: Option<Hinge>,
    pub upper_left: Option<Hinge>,
    pub lower_right: Option<Hinge>,
    pub upper_right: Option<Hinge>,
}

impl HingeKinds {
    fn record(&mut self, h: Hinge) {
        let slot = match (h.side, h.level) {
            (Side::Left, Level::Lower) => &mut self.lower_left,
            (Side::Left, Level::Upper) => &mut self.upper_left,
            (Side::Right, Level::Lower) => &mut self.lower_right,
            (Side::Right, Level::Upper) => &mut self.upper_right,
        };
        if slot.is_none() {
            *slot = Some(h);
        }
    }

    pub fn get(&self, side: Side, level: Level) -> Option<Hinge> {
        match (side, level) {
            (Side::Left, Level::Lower) => self.lower_left,
            (Side::Left, Level::Upper) => self.upper_left,
            (Side::Right, Level::Lower) => self.lower_right,
            (Side::Right, Level::Upper) => self.upper_right,
        }
    }
}

/// Precomputed uniform boundary samples for dense hinge scans.
#[derive(Clone, Debug)]
pub struct BoundaryScan {
    s: Vec<f64>,
    pts: Vec<Vec2>,
    normals: Vec<Vec2>,
    ds: f64,
}

impl BoundaryScan {
    pub fn new(curve: &BoundaryCurve, n: usize) -> Self {
        let ds = curve.total_length() / n as f64;
        let s: Vec<f64> = (0..n).map(|i| ds * (i as f64 + 0.5)).collect();
        let pts = s.iter().map(|&s| curve.point_at(s)).collect();
        let normals = s.iter().map(|&s| curve.normal_one_sided(s)).collect();
        BoundaryScan { s, pts, normals, ds }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Hinge types present for `chord`, including active zones narrower
    /// than the sample spacing (found by maximizing the reflection gap).
    pub fn hinge_kinds(&self, curve: &BoundaryCurve, chord: &Chord) -> HingeKinds {
        let n = self.s.len();
        let tol = curve.tolerances();
        let excl = 1e-4 * curve.diameter();
        let gap = |s: f64| curve.inside_gap(chord.reflect(curve.point_at(s)));
        let excluded = |s: f64| {
            curve.forward(s, chord.s_p).min(curve.forward(chord.s_p, s)) < excl
                || curve.forward(s, chord.s_q).min(curve.forward(chord.s_q, s)) < excl
        };
        let mut g = Vec::with_capacity(n);
        for i in 0..n {
            if excluded(self.s[i]) {
                g.push(f64::NAN);
            } else {
                g.push(curve.inside_gap(chord.reflect(self.pts[i])));
            }
        }
        let mut kinds = HingeKinds::default();
        let probe = |s: f64, kinds: &mut HingeKinds| {
            if excluded(s) {
                return;
            }
            let a = curve.point_at(s);
            if let Some(h) = hinge_geometry(chord, s, a, curve.normal_one_sided(s)) {
                kinds.record(h);
            }
        };
        let active = |v: f64| v >= -tol.bd;
        for i in 0..n {
            if g[i].is_nan() {
                continue;
            }
            if active(g[i]) {
                if let Some(h) = hinge_geometry(chord, self.s[i], self.pts[i], self.normals[i]) {
                    kinds.record(h);
                }
            }
            let j = (i + 1) % n;
            if g[j].is_nan() {
                continue;
            }
            // run boundary: refine the end of the active zone
            if active(g[i]) != active(g[j]) {
                let (a, b) = (self.s[i], self.s[i] + self.ds);
                let ga = g[i] + tol.bd;
                let e = math::bisect(|s| gap(s) + tol.bd, a, b, ga, 1e-12 * curve.diameter());
                let inward = if active(g[i]) { -1e-11 } else { 1e-11 } * curve.diameter();
                probe(e + inward, &mut kinds);
            }
            // tiny zone around a negative local maximum
            let h = (i + n - 1) % n;
            if !g[h].is_nan() && !active(g[i]) && g[i] >= g[h] && g[i] >= g[j] && g[i] > -3.0 * self.ds {
                let lo = self.s[i] - self.ds;
                let hi = self.s[i] + self.ds;
                let (sm, gm) = math::golden_max(gap, lo, hi, 1e-10 * curve.diameter());
                if active(gm) {
                    probe(sm, &mut kinds);
                    for end in [lo, hi] {
                        let ge = gap(end) + tol.bd;
                        if ge < 0.0 {
                            let e = math::bisect(|s| gap(s) + tol.bd, end, sm, ge, 1e-12 * curve.diameter());
                            let inward = if end < sm { 1e-11 } else { -1e-11 } * curve.diameter();
                            probe(e + inward, &mut kinds);
                        }
                    }
                }
            }
        }
        kinds
    }
}
