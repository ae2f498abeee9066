//! Convex piecewise-analytic boundary curves and the primitive queries on them.

mod fillet;
mod piece;

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use fillet::fillet_smooth;
pub use piece::BoundaryPiece;

use crate::math::{self, PI, TAU};
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("empty piece list")]
    Empty,
    #[error("degenerate piece {piece}: {reason}")]
    DegeneratePiece { piece: usize, reason: &'static str },
    #[error("boundary not closed: gap {gap:.3e} between piece {piece} and its successor")]
    NotClosed { piece: usize, gap: f64 },
    #[error("boundary not convex and counterclockwise near s = {s:.6}")]
    NotConvex { s: f64 },
    #[error("normal undefined at joint s = {s}: one-sided normals {before:?} and {after:?}")]
    JointPoint { s: f64, before: Vec2, after: Vec2 },
    #[error("curvature undefined at joint s = {s}: one-sided values {before} and {after}")]
    JointCurvature { s: f64, before: f64, after: f64 },
    #[error("normal angle matched by a flat piece on [{s_from}, {s_to}]")]
    FlatMatch { s_from: f64, s_to: f64 },
    #[error("line does not meet the domain")]
    NoIntersection,
    #[error("line only touches the boundary at s = {s}")]
    TangentLine { s: f64 },
    #[error("fillet radius {rho} too large (limit {limit})")]
    RhoTooLarge { rho: f64, limit: f64 },
}

/// Absolute tolerances, scaled by the domain diameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub root: f64,
    pub close: f64,
    pub convex: f64,
    pub bd: f64,
}

impl Tolerances {
    pub fn for_diameter(diam: f64) -> Self {
        Tolerances {
            root: 1e-10 * diam,
            close: 1e-9 * diam,
            convex: 1e-12,
            bd: 1e-9 * diam,
        }
    }
}

/// A line given by its direction angle in `[0, pi)` and a point on it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineRepr {
    pub angle: f64,
    pub anchor: Vec2,
}

impl LineRepr {
    pub fn new(angle: f64, anchor: Vec2) -> Self {
        LineRepr { angle: math::rem_pos(angle, PI), anchor }
    }

    pub fn through(a: Vec2, b: Vec2) -> Self {
        LineRepr::new((b - a).angle(), a)
    }

    /// `p(l) = e^{i angle}`.
    pub fn p(&self) -> Vec2 {
        Vec2::from_angle(self.angle)
    }

    /// `m(l) = -i p(l)`.
    pub fn m(&self) -> Vec2 {
        self.p().perp_neg()
    }

    /// Signed offset of `x` along `m`.
    pub fn side(&self, x: Vec2) -> f64 {
        (x - self.anchor).dot(self.m())
    }
}

pub fn reflect_point(a: Vec2, line: &LineRepr) -> Vec2 {
    let p = line.p();
    let w = a - line.anchor;
    let foot = line.anchor + p * w.dot(p);
    foot * 2.0 - a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Result of a normal-angle lookup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalMatch {
    pub s: f64,
    pub point: Vec2,
    /// True when the angle falls inside the normal cone of a corner.
    pub corner: bool,
}

/// The two boundary intersections of a line, ordered by the `e2` convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineHits {
    pub s_p: f64,
    pub s_q: f64,
    pub p: Vec2,
    pub q: Vec2,
}

/// Nearest boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Foot {
    pub s: f64,
    pub point: Vec2,
    pub dist: f64,
}

const TABLE_N: usize = 128;

#[derive(Clone, Debug)]
struct Piece {
    geo: BoundaryPiece,
    t0: f64,
    t1: f64,
    length: f64,
    /// Cumulative arclength at uniform parameter nodes (ellipse arcs only).
    table: Vec<f64>,
    /// Unwrapped normal angle at the start of the piece.
    nu0: f64,
    /// Total turning of the normal along the piece.
    turn: f64,
}

impl Piece {
    fn new(geo: BoundaryPiece) -> Piece {
        let (t0, t1) = geo.param_range();
        let mut table = Vec::new();
        let length = match geo {
            BoundaryPiece::CircleArc { radius, .. } => radius * (t1 - t0),
            BoundaryPiece::Segment { from, to } => from.dist(to),
            BoundaryPiece::EllipseArc { semi_axes: [a, b], .. } => {
                table.reserve(TABLE_N + 1);
                table.push(0.0);
                let h = (t1 - t0) / TABLE_N as f64;
                let mut acc = 0.0;
                for j in 0..TABLE_N {
                    let lo = t0 + h * j as f64;
                    let seg = math::adaptive_simpson(|t| geo.speed(t), lo, lo + h, 1e-11 * h * a.max(b));
                    acc += seg;
                    table.push(acc);
                }
                acc
            }
        };
        let turn = match geo {
            BoundaryPiece::Segment { .. } => 0.0,
            BoundaryPiece::CircleArc { .. } => t1 - t0,
            BoundaryPiece::EllipseArc { .. } => ellipse_nu(&geo, t1) - ellipse_nu(&geo, t0),
        };
        Piece { geo, t0, t1, length, table, nu0: 0.0, turn }
    }

    /// Arclength from the start of the piece to parameter `t`.
    fn s_of_t(&self, t: f64) -> f64 {
        match self.geo {
            BoundaryPiece::CircleArc { radius, .. } => radius * (t - self.t0),
            BoundaryPiece::Segment { .. } => self.length * t,
            BoundaryPiece::EllipseArc { .. } => {
                let h = (self.t1 - self.t0) / TABLE_N as f64;
                let j = (((t - self.t0) / h) as usize).min(TABLE_N - 1);
                let lo = self.t0 + h * j as f64;
                self.table[j] + math::gauss_legendre8(|x| self.geo.speed(x), lo, t)
            }
        }
    }

    /// Parameter at arclength `s` from the start.
    fn t_of_s(&self, s: f64) -> f64 {
        match self.geo {
            BoundaryPiece::CircleArc { radius, .. } => self.t0 + s / radius,
            BoundaryPiece::Segment { .. } => (s / self.length).clamp(0.0, 1.0),
            BoundaryPiece::EllipseArc { .. } => {
                let s = s.clamp(0.0, self.length);
                let h = (self.t1 - self.t0) / TABLE_N as f64;
                let j = match self.table.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
                    Ok(j) => return self.t0 + h * j as f64,
                    Err(j) => j.clamp(1, TABLE_N) - 1,
                };
                let (mut a, mut b) = (self.t0 + h * j as f64, self.t0 + h * (j + 1) as f64);
                let frac = (s - self.table[j]) / (self.table[j + 1] - self.table[j]);
                let mut t = a + frac * h;
                for _ in 0..50 {
                    let f = self.s_of_t(t) - s;
                    if f.abs() <= 1e-14 * self.length.max(1.0) {
                        break;
                    }
                    if f > 0.0 {
                        b = t;
                    } else {
                        a = t;
                    }
                    let mut tn = t - f / self.geo.speed(t);
                    if !(tn > a && tn < b) {
                        tn = 0.5 * (a + b);
                    }
                    t = tn;
                }
                t
            }
        }
    }

    /// Unwrapped normal angle at `t`.
    fn nu(&self, t: f64) -> f64 {
        match self.geo {
            BoundaryPiece::Segment { .. } => self.nu0,
            BoundaryPiece::CircleArc { .. } => self.nu0 + (t - self.t0),
            BoundaryPiece::EllipseArc { .. } => self.nu0 + ellipse_nu(&self.geo, t) - ellipse_nu(&self.geo, self.t0),
        }
    }

    fn unit_tangent(&self, t: f64) -> Vec2 {
        self.geo.d1(t).normalized()
    }
}

/// Continuous normal-angle function of an ellipse arc parameter.
fn ellipse_nu(geo: &BoundaryPiece, t: f64) -> f64 {
    let n = geo.d1(t).perp();
    let base = t + PI;
    base + math::wrap_pi(n.angle() - base)
}

/// A validated closed convex counterclockwise boundary.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pieces: Vec<Piece>,
    cumulative: Vec<f64>,
    total_length: f64,
    diameter: f64,
    center: Vec2,
    tol: Tolerances,
    /// Turning angle at the start of each piece (joint with its predecessor).
    joint_turn: Vec<f64>,
    sectors: Vec<Vec<u16>>,
    inradius: f64,
    max_radius: f64,
}

const SECTORS: usize = 512;

impl BoundaryCurve {
    /// Builds a curve with tolerances derived from its diameter.
    pub fn new(pieces: Vec<BoundaryPiece>) -> Result<Self, GeometryError> {
        let diam = rough_diameter(&pieces)?;
        let tol = Tolerances::for_diameter(diam);
        Self::with_tolerances(pieces, tol)
    }

    pub fn with_tolerances(pieces: Vec<BoundaryPiece>, tol: Tolerances) -> Result<Self, GeometryError> {
        if pieces.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (i, p) in pieces.iter().enumerate() {
            p.validate().map_err(|reason| GeometryError::DegeneratePiece { piece: i, reason })?;
        }
        let n = pieces.len();
        for i in 0..n {
            let gap = pieces[i].end().dist(pieces[(i + 1) % n].start());
            if gap > tol.close {
                return Err(GeometryError::NotClosed { piece: i, gap });
            }
        }
        let mut ps: Vec<Piece> = pieces.into_iter().map(Piece::new).collect();
        let mut cumulative = vec![0.0];
        for p in &ps {
            cumulative.push(cumulative.last().unwrap() + p.length);
        }
        let total_length = *cumulative.last().unwrap();

        // convexity: turning between successive sampled tangents
        let mut joint_turn = vec![0.0; n];
        let mut total_turn = 0.0;
        const SAMPLES: usize = 64;
        for k in 0..n {
            let prev = &ps[(k + n - 1) % n];
            let tin = prev.unit_tangent(prev.t1);
            let tout = ps[k].unit_tangent(ps[k].t0);
            let turn = math::atan2(tin.cross(tout), tin.dot(tout));
            if turn < -tol.convex {
                return Err(GeometryError::NotConvex { s: cumulative[k] });
            }
            joint_turn[k] = turn.max(0.0);
            total_turn += joint_turn[k];
            let p = &ps[k];
            let mut last = tout;
            for j in 1..=SAMPLES {
                let t = p.t0 + (p.t1 - p.t0) * j as f64 / SAMPLES as f64;
                let cur = p.unit_tangent(t);
                let c = last.cross(cur);
                let a = math::atan2(c, last.dot(cur));
                if c < -tol.convex || a < -tol.convex {
                    let s = cumulative[k] + p.s_of_t(t);
                    return Err(GeometryError::NotConvex { s });
                }
                total_turn += a;
                last = cur;
            }
        }
        if (total_turn - TAU).abs() > 1e-6 {
            return Err(GeometryError::NotConvex { s: 0.0 });
        }

        // unwrapped normal angles
        let n0 = ps[0].geo.d1(ps[0].t0).perp().angle();
        let mut nu = math::rem_pos(n0, TAU);
        for k in 0..n {
            if k > 0 {
                nu += joint_turn[k];
            }
            ps[k].nu0 = nu;
            nu += ps[k].turn;
        }

        // a centre and the diameter from dense samples
        let mut samples = Vec::with_capacity(n * 64);
        for p in &ps {
            for j in 0..64 {
                let t = p.t0 + (p.t1 - p.t0) * j as f64 / 64.0;
                samples.push(p.geo.eval(t));
            }
        }
        let center = polygon_centroid(&samples);
        let mut diameter: f64 = 0.0;
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                diameter = diameter.max(samples[i].dist(samples[j]));
            }
        }

        let mut curve = BoundaryCurve {
            pieces: ps,
            cumulative,
            total_length,
            diameter,
            center,
            tol,
            joint_turn,
            sectors: Vec::new(),
            inradius: 0.0,
            max_radius: 0.0,
        };
        curve.build_sectors();
        curve.inradius = curve.nearest_point(center).dist;
        curve.max_radius = samples.iter().map(|s| s.dist(center)).fold(0.0, f64::max);
        Ok(curve)
    }

    fn build_sectors(&mut self) {
        let mut sectors = vec![Vec::new(); SECTORS];
        let w = TAU / SECTORS as f64;
        for (k, p) in self.pieces.iter().enumerate() {
            let a0 = math::rem_pos((p.geo.eval(p.t0) - self.center).angle(), TAU);
            let mut sweep = math::rem_pos((p.geo.eval(p.t1) - self.center).angle() - a0, TAU);
            if sweep < 1e-12 && p.length > 0.5 * self.total_length {
                sweep = TAU;
            }
            let j0 = math::floor(a0 / w) as i64 - 1;
            let j1 = math::floor((a0 + sweep) / w) as i64 + 1;
            for j in j0..=j1 {
                let idx = j.rem_euclid(SECTORS as i64) as usize;
                if sectors[idx].last() != Some(&(k as u16)) {
                    sectors[idx].push(k as u16);
                }
            }
        }
        self.sectors = sectors;
    }

    pub fn pieces(&self) -> impl Iterator<Item = &BoundaryPiece> {
        self.pieces.iter().map(|p| &p.geo)
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn cumulative_lengths(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// An interior point the curve is star-shaped about.
    pub fn center(&self) -> Vec2 {
        self.center
    }

    /// Area enclosed, by the shoelace formula on the exact pieces.
    pub fn area(&self) -> f64 {
        let mut a = 0.0;
        for p in &self.pieces {
            a += 0.5 * math::gauss_legendre_composite(|t| p.geo.eval(t).cross(p.geo.d1(t)), p.t0, p.t1, 32);
        }
        a
    }

    /// `s` reduced modulo the total length.
    pub fn wrap(&self, s: f64) -> f64 {
        math::rem_pos(s, self.total_length)
    }

    /// Forward arclength distance from `a` to `b`.
    pub fn forward(&self, a: f64, b: f64) -> f64 {
        math::rem_pos(b - a, self.total_length)
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let s = self.wrap(s);
        let k = match self.cumulative.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(self.pieces.len() - 1),
            Err(k) => k - 1,
        };
        let p = &self.pieces[k];
        (k, p.t_of_s(s - self.cumulative[k]))
    }

    /// Arclength position of parameter `t` of piece `k`.
    pub fn s_of(&self, k: usize, t: f64) -> f64 {
        self.wrap(self.cumulative[k] + self.pieces[k].s_of_t(t))
    }

    pub fn point_at(&self, s: f64) -> Vec2 {
        let (k, t) = self.locate(s);
        self.pieces[k].geo.eval(t)
    }

    /// Unit tangent, taken from the piece containing `s` (right-sided at joints).
    pub fn tangent_at(&self, s: f64) -> Vec2 {
        let (k, t) = self.locate(s);
        self.pieces[k].unit_tangent(t)
    }

    /// Inward unit normal, right-sided at joints.
    pub fn normal_one_sided(&self, s: f64) -> Vec2 {
        self.tangent_at(s).perp()
    }

    /// Unwrapped normal angle at `s` (right-sided), in `[nu(0), nu(0) + 2 pi)`.
    pub fn normal_angle(&self, s: f64) -> f64 {
        let (k, t) = self.locate(s);
        self.pieces[k].nu(t)
    }

    fn joint_at(&self, s: f64) -> Option<usize> {
        let s = self.wrap(s);
        let n = self.pieces.len();
        for k in 0..n {
            let c = self.cumulative[k];
            if (s - c).abs() <= self.tol.root || (k == 0 && (self.total_length - s) <= self.tol.root) {
                return Some(k);
            }
        }
        None
    }

    /// Inward unit normal; fails at a corner.
    pub fn normal_at(&self, s: f64) -> Result<Vec2, GeometryError> {
        if let Some(k) = self.joint_at(s) {
            if self.joint_turn[k] > 1e-9 {
                let n = self.pieces.len();
                let prev = &self.pieces[(k + n - 1) % n];
                let before = prev.unit_tangent(prev.t1).perp();
                let after = self.pieces[k].unit_tangent(self.pieces[k].t0).perp();
                return Err(GeometryError::JointPoint { s: self.cumulative[k], before, after });
            }
        }
        Ok(self.normal_one_sided(s))
    }

    /// Curvature (nonnegative); fails at joints where it jumps.
    pub fn curvature_at(&self, s: f64) -> Result<f64, GeometryError> {
        if let Some(k) = self.joint_at(s) {
            let n = self.pieces.len();
            let prev = &self.pieces[(k + n - 1) % n];
            let before = prev.geo.curvature(prev.t1);
            let after = self.pieces[k].geo.curvature(self.pieces[k].t0);
            if (before - after).abs() > 1e-9 * (1.0 + before.abs()) || self.joint_turn[k] > 1e-9 {
                return Err(GeometryError::JointCurvature { s: self.cumulative[k], before, after });
            }
        }
        let (k, t) = self.locate(s);
        Ok(self.pieces[k].geo.curvature(t).max(0.0))
    }

    /// One-sided curvature from the piece containing `s`.
    pub fn curvature_one_sided(&self, s: f64) -> f64 {
        let (k, t) = self.locate(s);
        self.pieces[k].geo.curvature(t).max(0.0)
    }

    /// Arclength positions of non-C1 joints.
    pub fn corners(&self) -> Vec<f64> {
        (0..self.pieces.len())
            .filter(|&k| self.joint_turn[k] > 1e-9)
            .map(|k| self.cumulative[k])
            .collect()
    }

    /// Arclength positions of all piece joints.
    pub fn joints(&self) -> Vec<f64> {
        self.cumulative[..self.pieces.len()].to_vec()
    }

    /// The boundary point whose inward normal is `e^{i beta}`.
    pub fn find_by_normal_angle(&self, beta: f64) -> Result<NormalMatch, GeometryError> {
        let base = self.pieces[0].nu0;
        let tau = base + math::rem_pos(beta - base, TAU);
        let n = self.pieces.len();
        let flat_tol = 1e-12;
        for k in 0..n {
            let p = &self.pieces[k];
            let d = math::wrap_pi(tau - p.nu0).abs();
            if p.turn <= flat_tol && d <= flat_tol {
                return Err(GeometryError::FlatMatch {
                    s_from: self.cumulative[k],
                    s_to: self.cumulative[k + 1],
                });
            }
        }
        for k in 0..n {
            let p = &self.pieces[k];
            let lo = p.nu0;
            let hi = p.nu0 + p.turn;
            if p.turn > flat_tol && tau >= lo && tau <= hi {
                let t = math::bisect(|t| p.nu(t) - tau, p.t0, p.t1, p.nu(p.t0) - tau, 1e-15 * (1.0 + p.t1.abs()));
                let s = self.s_of(k, t);
                return Ok(NormalMatch { s, point: p.geo.eval(t), corner: false });
            }
            // corner cone after this piece
            let next_lo = if k + 1 < n { self.pieces[k + 1].nu0 } else { base + TAU };
            if tau > hi && tau < next_lo {
                let s = self.wrap(self.cumulative[k + 1]);
                return Ok(NormalMatch { s, point: self.point_at(s), corner: true });
            }
        }
        // only reachable through rounding at the wrap-around
        let s = 0.0;
        Ok(NormalMatch { s, point: self.point_at(s), corner: self.joint_turn[0] > 1e-9 })
    }

    /// Both boundary intersections of `line`, ordered so `(Q - P) . e2 > 0`
    /// (or `(Q - P) . e1 > 0` for horizontal lines).
    pub fn line_boundary_intersections(&self, line: &LineRepr) -> Result<LineHits, GeometryError> {
        let d = line.p();
        let eps = self.tol.close;
        let mut hits: Vec<(f64, f64, Vec2)> = Vec::with_capacity(4);
        for (k, p) in self.pieces.iter().enumerate() {
            for (lambda, t) in p.geo.line_hits(line.anchor, d, eps) {
                let pt = line.anchor + d * lambda;
                if hits.iter().any(|h| (h.0 - lambda).abs() <= eps) {
                    continue;
                }
                hits.push((lambda, self.s_of(k, t), pt));
            }
        }
        if hits.is_empty() {
            return Err(GeometryError::NoIntersection);
        }
        hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (first, last) = (hits[0], hits[hits.len() - 1]);
        if last.0 - first.0 <= eps {
            return Err(GeometryError::TangentLine { s: first.1 });
        }
        if hits.len() > 2 {
            // the line runs along a flat piece: a supporting line
            let mid = line.anchor + d * (0.5 * (first.0 + last.0));
            if self.locate_point(mid) != Location::Inside {
                return Err(GeometryError::TangentLine { s: first.1 });
            }
        }
        let (mut a, mut b) = (first, last);
        let v = b.2 - a.2;
        let swap = if v.y.abs() > self.tol.close { v.y < 0.0 } else { v.x < 0.0 };
        if swap {
            core::mem::swap(&mut a, &mut b);
        }
        Ok(LineHits { s_p: a.1, s_q: b.1, p: a.2, q: b.2 })
    }

    /// Distance from the centre to the boundary along direction `u` (unit).
    pub fn radial(&self, u: Vec2) -> f64 {
        let phi = math::rem_pos(u.angle(), TAU);
        let idx = ((phi / TAU * SECTORS as f64) as usize).min(SECTORS - 1);
        // Exact parameter ranges first: a tolerant hit on the extension of a
        // piece past a corner would overshoot the true boundary.
        for eps in [0.0, self.tol.close] {
            let mut best: Option<f64> = None;
            for &k in &self.sectors[idx] {
                for (lambda, _) in self.pieces[k as usize].geo.line_hits(self.center, u, eps) {
                    if lambda > 0.0 {
                        best = Some(best.map_or(lambda, |b: f64| b.max(lambda)));
                    }
                }
            }
            if let Some(b) = best {
                return b;
            }
        }
        let eps = self.tol.close;
        let mut r: f64 = 0.0;
        for p in &self.pieces {
            for (lambda, _) in p.geo.line_hits(self.center, u, eps) {
                r = r.max(lambda);
            }
        }
        r
    }

    /// Radial gap `R(dir) - |x - c|`: positive inside, negative outside.
    pub fn inside_gap(&self, x: Vec2) -> f64 {
        let w = x - self.center;
        let r = w.norm();
        if r == 0.0 {
            return self.inradius;
        }
        self.radial(w / r) - r
    }

    /// Fast inside test without a boundary band.
    #[inline]
    pub fn contains(&self, x: Vec2) -> bool {
        (x - self.center).norm2() < self.inradius * self.inradius || self.inside_gap(x) >= 0.0
    }

    /// Radius of the largest disk about `center` inside the domain.
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn nearest_point(&self, x: Vec2) -> Foot {
        let mut best = Foot { s: 0.0, point: x, dist: f64::INFINITY };
        for (k, p) in self.pieces.iter().enumerate() {
            let (t, d) = p.geo.nearest(x);
            if d < best.dist {
                best = Foot { s: self.s_of(k, t), point: p.geo.eval(t), dist: d };
            }
        }
        best
    }

    /// Distance to the boundary, positive inside.
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        let d = self.nearest_point(x).dist;
        if self.inside_gap(x) >= 0.0 {
            d
        } else {
            -d
        }
    }

    /// Classification with the boundary band `tol.bd`.
    pub fn locate_point(&self, x: Vec2) -> Location {
        let g = self.inside_gap(x);
        // the true distance is at least g * inradius / max_radius
        let lower = g.abs() * self.inradius / self.max_radius;
        if lower > self.tol.bd {
            return if g > 0.0 { Location::Inside } else { Location::Outside };
        }
        let d = self.signed_distance(x);
        if d.abs() <= self.tol.bd {
            Location::Boundary
        } else if d > 0.0 {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// True for points of the closed domain (within `tol`).
    pub fn in_closure(&self, x: Vec2, tol: f64) -> bool {
        let g = self.inside_gap(x);
        if g >= 0.0 {
            return true;
        }
        if -g * self.inradius / self.max_radius > tol {
            return false;
        }
        self.nearest_point(x).dist <= tol
    }

    /// Nearest point of the closed domain.
    pub fn project(&self, x: Vec2) -> Vec2 {
        if self.contains(x) {
            x
        } else {
            self.nearest_point(x).point
        }
    }

    /// Dense polyline of the boundary with `n` points uniform in arclength.
    pub fn polyline(&self, n: usize) -> Vec<Vec2> {
        (0..n).map(|i| self.point_at(self.total_length * i as f64 / n as f64)).collect()
    }

    /// Polyline resolving every joint exactly, with spacing at most `h`.
    pub fn sample_with_joints(&self, h: f64) -> Vec<(f64, Vec2)> {
        let mut out = Vec::new();
        for k in 0..self.pieces.len() {
            let len = self.pieces[k].length;
            let m = math::ceil(len / h).max(1.0) as usize;
            for j in 0..m {
                let s = self.cumulative[k] + len * j as f64 / m as f64;
                out.push((s, self.point_at(s)));
            }
        }
        out
    }
}

fn rough_diameter(pieces: &[BoundaryPiece]) -> Result<f64, GeometryError> {
    if pieces.is_empty() {
        return Err(GeometryError::Empty);
    }
    let mut pts = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        p.validate().map_err(|reason| GeometryError::DegeneratePiece { piece: i, reason })?;
        let (t0, t1) = p.param_range();
        for j in 0..=16 {
            pts.push(p.eval(t0 + (t1 - t0) * j as f64 / 16.0));
        }
    }
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            d = d.max(pts[i].dist(pts[j]));
        }
    }
    Ok(d)
}

fn polygon_centroid(pts: &[Vec2]) -> Vec2 {
    let n = pts.len();
    let mut a = 0.0;
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let w = p.cross(q);
        a += w;
        c += (p + q) * w;
    }
    if a.abs() < 1e-300 {
        return pts.iter().fold(Vec2::ZERO, |acc, &p| acc + p) / n as f64;
    }
    c / (3.0 * a)
}

#[cfg(test)]
mod tests;
