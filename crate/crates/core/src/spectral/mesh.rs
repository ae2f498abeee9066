use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::geometry::BoundaryCurve;
use crate::math;
use crate::vec2::Vec2;

/// Smallest interior angle accepted by `triangulate`, in degrees.
pub const MIN_ANGLE_DEG: f64 = 15.0;
const RETRIES: usize = 5;
/// Lattice points closer than this multiple of `h` to the boundary are dropped.
const BOUNDARY_CLEARANCE: f64 = 0.45;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec2>,
    pub triangles: Vec<[u32; 3]>,
    pub boundary: Vec<bool>,
    pub h: f64,
}

fn c(p: Vec2) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

fn orient(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    robust::orient2d(c(a), c(b), c(p))
}

/// Positive when `d` is strictly inside the circle through ccw `a, b, c`.
fn incircle(a: Vec2, b: Vec2, cc: Vec2, d: Vec2) -> f64 {
    robust::incircle(c(a), c(b), c(cc), c(d))
}

const NONE: u32 = u32::MAX;

/// Incremental Bowyer-Watson triangulation with exact predicates.
struct Delaunay {
    pts: Vec<Vec2>,
    tris: Vec<[u32; 3]>,
    /// Neighbor across the edge opposite vertex `i`.
    nbr: Vec<[u32; 3]>,
    alive: Vec<bool>,
    last: u32,
}

impl Delaunay {
    fn new(lo: Vec2, hi: Vec2) -> Self {
        let mid = (lo + hi) * 0.5;
        let r = (hi - lo).norm().max(1.0) * 1e3;
        let pts = vec![
            mid + Vec2::new(-r, -r),
            mid + Vec2::new(r, -r),
            mid + Vec2::new(0.0, r),
        ];
        Delaunay { pts, tris: vec![[0, 1, 2]], nbr: vec![[NONE; 3]], alive: vec![true], last: 0 }
    }

    fn locate(&self, p: Vec2) -> u32 {
        let mut t = self.last;
        let mut guard = 0usize;
        'walk: loop {
            guard += 1;
            debug_assert!(guard < 10 * self.tris.len() + 10);
            let v = self.tris[t as usize];
            // rotate the starting edge so repeated visits do not cycle
            for k in 0..3 {
                let i = (k + guard) % 3;
                let (a, b) = (self.pts[v[(i + 1) % 3] as usize], self.pts[v[(i + 2) % 3] as usize]);
                if orient(a, b, p) < 0.0 {
                    let n = self.nbr[t as usize][i];
                    if n != NONE {
                        t = n;
                        continue 'walk;
                    }
                }
            }
            return t;
        }
    }

    fn insert(&mut self, p: Vec2) {
        let idx = self.pts.len() as u32;
        self.pts.push(p);
        let start = self.locate(p);
        let mut cavity = vec![start];
        let mut in_cavity = vec![start];
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k] as usize;
            k += 1;
            for i in 0..3 {
                let n = self.nbr[t][i];
                if n == NONE || in_cavity.contains(&n) {
                    continue;
                }
                let v = self.tris[n as usize];
                if incircle(self.pts[v[0] as usize], self.pts[v[1] as usize], self.pts[v[2] as usize], p) > 0.0 {
                    cavity.push(n);
                    in_cavity.push(n);
                }
            }
        }
        // boundary edges of the cavity, each with its outer neighbor
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for &t in &cavity {
            let v = self.tris[t as usize];
            for i in 0..3 {
                let n = self.nbr[t as usize][i];
                if n == NONE || !in_cavity.contains(&n) {
                    edges.push((v[(i + 1) % 3], v[(i + 2) % 3], n));
                }
            }
            self.alive[t as usize] = false;
        }
        let first = self.tris.len() as u32;
        for (j, &(a, b, outer)) in edges.iter().enumerate() {
            let t = first + j as u32;
            self.tris.push([a, b, idx]);
            self.alive.push(true);
            // neighbor opposite idx is the outer triangle
            self.nbr.push([NONE, NONE, outer]);
            if outer != NONE {
                let on = &mut self.nbr[outer as usize];
                let ov = self.tris[outer as usize];
                for i in 0..3 {
                    if ov[(i + 1) % 3] == b && ov[(i + 2) % 3] == a {
                        on[i] = t;
                    }
                }
            }
        }
        for j in 0..edges.len() {
            let (a, b, _) = edges[j];
            let t = (first as usize) + j;
            for (l, &(a2, b2, _)) in edges.iter().enumerate() {
                if a2 == b {
                    // shares edge (b, idx); opposite a
                    self.nbr[t][0] = first + l as u32;
                }
                if b2 == a {
                    self.nbr[t][1] = first + l as u32;
                }
            }
        }
        self.last = first;
    }
}

fn min_angle_deg(a: Vec2, b: Vec2, cc: Vec2) -> f64 {
    let ang = |p: Vec2, q: Vec2, r: Vec2| {
        let (u, v) = (q - p, r - p);
        math::atan2(u.cross(v).abs(), u.dot(v))
    };
    ang(a, b, cc).min(ang(b, cc, a)).min(ang(cc, a, b)).to_degrees()
}

/// Order in which a run of `m` samples is inserted: both ends first, then
/// repeated midpoints, so no new point extends a collinear run outward.
fn bisection_order(m: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    let mut stack = vec![(0usize, m)];
    while let Some((lo, hi)) = stack.pop() {
        if lo >= hi {
            continue;
        }
        let mid = (lo + hi) / 2;
        out.push(mid);
        stack.push((mid + 1, hi));
        stack.push((lo, mid));
    }
    out
}

fn lattice_offset(attempt: usize) -> (f64, f64) {
    // low-discrepancy shifts of the lattice origin
    let g = 0.618_033_988_749_895;
    ((attempt as f64 * g) % 1.0, (attempt as f64 * g * g + 0.5 * attempt as f64) % 1.0)
}

fn build(curve: &BoundaryCurve, h: f64, attempt: usize) -> Result<TriMesh, SpectralError> {
    let mut pts: Vec<Vec2> = Vec::new();
    let mut boundary: Vec<bool> = Vec::new();
    // piece ends first, then each piece by bisection
    let cum = curve.cumulative_lengths();
    let n_pieces = curve.piece_count();
    for k in 0..n_pieces {
        pts.push(curve.point_at(cum[k]));
        boundary.push(true);
    }
    for k in 0..n_pieces {
        let len = cum[k + 1] - cum[k];
        let m = math::ceil(len / h).max(1.0) as usize;
        for j in bisection_order(m - 1) {
            let s = cum[k] + len * (j + 1) as f64 / m as f64;
            pts.push(curve.point_at(s));
            boundary.push(true);
        }
    }
    let n_boundary = pts.len();
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let dy = h * math::sqrt(3.0) / 2.0;
    let (ox, oy) = lattice_offset(attempt);
    let rows = math::ceil((hi.y - lo.y) / dy) as i64 + 2;
    let cols = math::ceil((hi.x - lo.x) / h) as i64 + 2;
    for r in -1..rows {
        let y = lo.y + (r as f64 + oy) * dy;
        let shift = if r.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        for q in -1..cols {
            let x = lo.x + (q as f64 + ox) * h + shift;
            let p = Vec2::new(x, y);
            if curve.signed_distance(p) > BOUNDARY_CLEARANCE * h {
                pts.push(p);
                boundary.push(false);
            }
        }
    }
    let mut dt = Delaunay::new(lo, hi);
    for &p in &pts {
        dt.insert(p);
    }
    let mut triangles = Vec::new();
    let mut worst: f64 = 180.0;
    for (t, v) in dt.tris.iter().enumerate() {
        if !dt.alive[t] || v.iter().any(|&i| i < 3) {
            continue;
        }
        let tri = [v[0] - 3, v[1] - 3, v[2] - 3];
        let (a, b, cc) = (pts[tri[0] as usize], pts[tri[1] as usize], pts[tri[2] as usize]);
        let area = 0.5 * (b - a).cross(cc - a);
        if !(area > 1e-14 * h * h) {
            return Err(SpectralError::DegenerateTriangle { index: triangles.len() });
        }
        worst = worst.min(min_angle_deg(a, b, cc));
        triangles.push(tri);
    }
    if worst < MIN_ANGLE_DEG {
        return Err(SpectralError::MeshQualityFailure { min_angle: worst });
    }
    let _ = n_boundary;
    Ok(TriMesh { vertices: pts, triangles, boundary, h })
}

/// Delaunay mesh of the boundary samples and a hexagonal interior lattice
/// of spacing `h`. The lattice origin is shifted on each retry until every
/// triangle has all angles at least `MIN_ANGLE_DEG`.
pub fn triangulate(curve: &BoundaryCurve, h: f64) -> Result<TriMesh, SpectralError> {
    if !(h > 0.0) || h >= curve.diameter() / 10.0 {
        return Err(SpectralError::BadMeshSize { h });
    }
    let mut last = None;
    for attempt in 0..RETRIES {
        match build(curve, h, attempt) {
            Ok(m) => return Ok(m),
            Err(e @ SpectralError::MeshQualityFailure { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

impl TriMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn corners(&self, t: usize) -> [Vec2; 3] {
        let v = self.triangles[t];
        [self.vertices[v[0] as usize], self.vertices[v[1] as usize], self.vertices[v[2] as usize]]
    }

    pub fn area_of(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * (b - a).cross(c - a)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area_of(t)).sum()
    }

    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                min_angle_deg(a, b, c)
            })
            .fold(180.0, f64::min)
    }

    /// Whether `p` lies strictly inside the circumcircle of triangle `t`.
    pub fn in_circumcircle(&self, t: usize, p: Vec2) -> bool {
        let [a, b, c] = self.corners(t);
        incircle(a, b, c, p) > 0.0
    }

    /// Gradient of the linear interpolant of `f` on triangle `t`.
    pub fn gradient(&self, t: usize, f: &[f64]) -> Vec2 {
        let v = self.triangles[t];
        let [a, b, c] = self.corners(t);
        let two_a = (b - a).cross(c - a);
        let (fa, fb, fc) = (f[v[0] as usize], f[v[1] as usize], f[v[2] as usize]);
        // sum of f_i times the rotated opposite edge
        let g = (c - b).perp() * fa + (a - c).perp() * fb + (b - a).perp() * fc;
        g / two_a
    }
}

/// Point location by a uniform bucket grid over triangle bounding boxes.
#[derive(Clone, Debug)]
pub struct Locator {
    lo: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    pub fn new(mesh: &TriMesh) -> Self {
        let (mut lo, mut hi) = (mesh.vertices[0], mesh.vertices[0]);
        for p in &mesh.vertices {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let cell = 2.0 * mesh.h;
        let nx = (math::ceil((hi.x - lo.x) / cell) as usize).max(1);
        let ny = (math::ceil((hi.y - lo.y) / cell) as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for t in 0..mesh.triangles.len() {
            let cs = mesh.corners(t);
            let (mut a, mut b) = (cs[0], cs[0]);
            for p in cs {
                a = Vec2::new(a.x.min(p.x), a.y.min(p.y));
                b = Vec2::new(b.x.max(p.x), b.y.max(p.y));
            }
            let (i0, j0) = Self::cell_of(lo, cell, nx, ny, a);
            let (i1, j1) = Self::cell_of(lo, cell, nx, ny, b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Locator { lo, cell, nx, ny, buckets }
    }

    fn cell_of(lo: Vec2, cell: f64, nx: usize, ny: usize, p: Vec2) -> (usize, usize) {
        let i = (math::floor((p.x - lo.x) / cell).max(0.0) as usize).min(nx - 1);
        let j = (math::floor((p.y - lo.y) / cell).max(0.0) as usize).min(ny - 1);
        (i, j)
    }

    fn bary(mesh: &TriMesh, t: usize, p: Vec2) -> [f64; 3] {
        let [a, b, c] = mesh.corners(t);
        let d = (b - a).cross(c - a);
        let l1 = (c - b).cross(p - b) / d;
        let l2 = (a - c).cross(p - c) / d;
        [l1, l2, 1.0 - l1 - l2]
    }

    /// Triangle containing `p` with barycentric coordinates. Points just
    /// outside the mesh polygon get the nearest triangle nearby.
    pub fn locate(&self, mesh: &TriMesh, p: Vec2) -> Option<(usize, [f64; 3])> {
        let (ci, cj) = Self::cell_of(self.lo, self.cell, self.nx, self.ny, p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for ring in 0..2usize {
            let (i0, i1) = (ci.saturating_sub(ring), (ci + ring).min(self.nx - 1));
            let (j0, j1) = (cj.saturating_sub(ring), (cj + ring).min(self.ny - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    for &t in &self.buckets[j * self.nx + i] {
                        let l = Self::bary(mesh, t as usize, p);
                        let worst = l[0].min(l[1]).min(l[2]);
                        if worst >= -1e-12 {
                            return Some((t as usize, l));
                        }
                        if best.is_none_or(|b| worst > b.2) {
                            best = Some((t as usize, l, worst));
                        }
                    }
                }
            }
        }
        best.map(|(t, l, _)| (t, l))
    }

    pub fn interpolate(&self, mesh: &TriMesh, f: &[f64], p: Vec2) -> Option<f64> {
        let (t, l) = self.locate(mesh, p)?;
        let v = mesh.triangles[t];
        Some(l[0] * f[v[0] as usize] + l[1] * f[v[1] as usize] + l[2] * f[v[2] as usize])
    }
}
