use alloc::vec::Vec;

use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use super::{Locator, Multiplicity, SpectralError, TriMesh};
use crate::coupling::path_rng;
use crate::geometry::{BoundaryCurve, LineRepr};
use crate::hinges::SpecialPoints;
use crate::lyapunov::LyapunovSet;
use crate::math;
use crate::vec2::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub n_pairs: usize,
    /// Fraction of pairs with `s psi(y) >= s psi(x) - tol`.
    pub fraction: f64,
    /// Largest `s (psi(x) - psi(y))` over the sampled pairs.
    pub worst_violation: f64,
    /// The sign `s` that maximizes the fraction.
    pub sign: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub n_left: usize,
    pub n_right: usize,
    /// Vertices of the left region with `s psi > tol` plus vertices of the
    /// right region with `s psi < -tol`.
    pub violations: usize,
    pub violating_fraction: f64,
    /// The left region carries the nonpositive values of `s psi`.
    pub left_nonpositive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub n_triangles: usize,
    pub n_inside: usize,
    pub fraction: f64,
    /// Largest angular excess beyond the cone, radians.
    pub worst_excess: f64,
    pub tol_angle: f64,
    /// Triangles of the middle region outside the cone.
    pub violating: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HotSpots {
    pub argmax: Vec2,
    pub argmin: Vec2,
    pub max: f64,
    pub min: f64,
    pub max_on_boundary: bool,
    pub min_on_boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionAnalysis {
    pub multiplicity: Multiplicity,
    pub monotonicity: MonotonicityReport,
    pub sign: SignReport,
    pub cone: ConeReport,
    pub hot_spots: HotSpots,
    pub nodal: Vec<[Vec2; 2]>,
    /// Nodal segment endpoints inside the left or right region beyond the
    /// mesh size.
    pub nodal_in_regions: usize,
}

/// Side value with the sign convention of `ref_pt`: positive on the side
/// of the line through `a, b` containing `ref_pt`.
fn side_toward(a: Vec2, b: Vec2, ref_pt: Vec2) -> impl Fn(Vec2) -> f64 {
    let line = LineRepr::through(a, b);
    let s = line.side(ref_pt).signum();
    move |x| s * line.side(x)
}

/// Membership tests of the three regions: left of `[P1, Q'6]`, right of
/// `[P'1, Q6]`, and the middle part between `[P3, Q'4]` and `[P'3, Q4]`.
pub struct Regions {
    left: (Vec2, Vec2, Vec2),
    right: (Vec2, Vec2, Vec2),
    mid_a: (Vec2, Vec2, Vec2),
    mid_b: (Vec2, Vec2, Vec2),
}

impl Regions {
    pub fn new(sp: &SpecialPoints) -> Self {
        let (p, q) = (&sp.plain, &sp.primed);
        Regions {
            left: (p.p1.xy, q.q6.xy, p.q6.xy),
            right: (q.p1.xy, p.q6.xy, q.q6.xy),
            mid_a: (p.p3.xy, q.q4.xy, p.q4.xy),
            mid_b: (q.p3.xy, p.q4.xy, q.q4.xy),
        }
    }

    fn away(t: (Vec2, Vec2, Vec2), x: Vec2) -> f64 {
        -side_toward(t.0, t.1, t.2)(x)
    }

    /// Signed distance-like value, positive inside the left region.
    pub fn left(&self, x: Vec2) -> f64 {
        Self::away(self.left, x)
    }

    pub fn right(&self, x: Vec2) -> f64 {
        Self::away(self.right, x)
    }

    pub fn middle(&self, x: Vec2) -> bool {
        side_toward(self.mid_a.0, self.mid_a.1, self.mid_a.2)(x) > 0.0
            && side_toward(self.mid_b.0, self.mid_b.1, self.mid_b.2)(x) > 0.0
    }
}

/// Samples `n_pairs` pairs in the pair set and measures how often the
/// eigenfunction does not decrease from `x` to `y`.
pub fn monotonicity(
    curve: &BoundaryCurve,
    lset: &LyapunovSet,
    mesh: &TriMesh,
    loc: &Locator,
    psi: &[f64],
    tol: f64,
    n_pairs: usize,
    seed: u64,
) -> MonotonicityReport {
    let mut rng = path_rng(seed, 0);
    let (mut lo, mut hi) = (mesh.vertices[0], mesh.vertices[0]);
    for p in &mesh.vertices {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let ux = Uniform::new(lo.x, hi.x).unwrap();
    let uy = Uniform::new(lo.y, hi.y).unwrap();
    let point = |rng: &mut _| loop {
        let p = Vec2::new(ux.sample(rng), uy.sample(rng));
        if curve.contains(p) {
            return p;
        }
    };
    let mut diffs = Vec::with_capacity(n_pairs);
    while diffs.len() < n_pairs {
        let x = point(&mut rng);
        let y = point(&mut rng);
        if !matches!(lset.pair_in_t(curve, x, y), Ok(true)) {
            continue;
        }
        let (Some(fx), Some(fy)) = (loc.interpolate(mesh, psi, x), loc.interpolate(mesh, psi, y)) else { continue };
        diffs.push(fy - fx);
    }
    let count = |s: f64| diffs.iter().filter(|d| s * **d >= -tol).count();
    let sign = if count(1.0) >= count(-1.0) { 1.0 } else { -1.0 };
    let worst = diffs.iter().map(|d| -sign * d).fold(f64::NEG_INFINITY, f64::max);
    MonotonicityReport {
        n_pairs,
        fraction: count(sign) as f64 / n_pairs as f64,
        worst_violation: worst.max(0.0),
        sign,
        tol,
    }
}

/// Sign of `s psi` on the vertices of the left and right regions, counted
/// for the orientation with fewer violations.
pub fn sign_regions(mesh: &TriMesh, regions: &Regions, psi: &[f64], sign: f64, tol: f64) -> SignReport {
    let (mut nl, mut nr) = (0, 0);
    let (mut bad_a, mut bad_b) = (0, 0);
    for (p, &f) in mesh.vertices.iter().zip(psi) {
        let f = sign * f;
        if regions.left(*p) > 0.0 {
            nl += 1;
            bad_a += (f > tol) as usize;
            bad_b += (f < -tol) as usize;
        }
        if regions.right(*p) > 0.0 {
            nr += 1;
            bad_a += (f < -tol) as usize;
            bad_b += (f > tol) as usize;
        }
    }
    let left_nonpositive = bad_a <= bad_b;
    let violations = bad_a.min(bad_b);
    SignReport {
        n_left: nl,
        n_right: nr,
        violations,
        violating_fraction: violations as f64 / (nl + nr).max(1) as f64,
        left_nonpositive,
    }
}

/// Gradient directions of `s psi` on triangles of the middle region against
/// the cone `[alpha - pi/2, pi/2 - alpha]`.
pub fn gradient_cone(mesh: &TriMesh, regions: &Regions, psi: &[f64], sign: f64, alpha: f64, tol_angle: f64) -> ConeReport {
    let half = math::FRAC_PI_2 - alpha;
    let (mut n, mut inside) = (0, 0);
    let mut worst: f64 = 0.0;
    let mut violating = Vec::new();
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.corners(t);
        if !regions.middle((a + b + c) / 3.0) {
            continue;
        }
        n += 1;
        let g = mesh.gradient(t, psi) * sign;
        let excess = g.angle().abs() - half;
        worst = worst.max(excess);
        if excess <= tol_angle {
            inside += 1;
        } else {
            violating.push(t as u32);
        }
    }
    ConeReport {
        n_triangles: n,
        n_inside: inside,
        fraction: inside as f64 / n.max(1) as f64,
        worst_excess: worst,
        tol_angle,
        violating,
    }
}

pub fn hot_spots(mesh: &TriMesh, psi: &[f64]) -> HotSpots {
    let (mut imax, mut imin) = (0, 0);
    for i in 0..psi.len() {
        if psi[i] > psi[imax] {
            imax = i;
        }
        if psi[i] < psi[imin] {
            imin = i;
        }
    }
    HotSpots {
        argmax: mesh.vertices[imax],
        argmin: mesh.vertices[imin],
        max: psi[imax],
        min: psi[imin],
        max_on_boundary: mesh.boundary[imax],
        min_on_boundary: mesh.boundary[imin],
    }
}

/// Zero set of the piecewise linear interpolant, one segment per crossed
/// triangle.
pub fn nodal_polyline(mesh: &TriMesh, psi: &[f64]) -> Vec<[Vec2; 2]> {
    let mut out = Vec::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let cs = mesh.corners(t);
        let f = [psi[tri[0] as usize], psi[tri[1] as usize], psi[tri[2] as usize]];
        let mut pts = Vec::with_capacity(2);
        for i in 0..3 {
            let j = (i + 1) % 3;
            if (f[i] < 0.0) != (f[j] < 0.0) {
                let w = f[i] / (f[i] - f[j]);
                pts.push(cs[i].lerp(cs[j], w));
            }
        }
        if pts.len() == 2 {
            out.push([pts[0], pts[1]]);
        }
    }
    out
}

/// Max-norm Richardson error of an eigenfunction from two mesh levels,
/// sampled at the coarse vertices. Both vectors must be M-normalized; the
/// fine one is sign-aligned with the coarse one first.
pub fn eigenfunction_error(coarse: &TriMesh, psi_c: &[f64], fine: &TriMesh, loc_f: &Locator, psi_f: &[f64]) -> f64 {
    let vals: Vec<(f64, f64)> = coarse
        .vertices
        .iter()
        .zip(psi_c)
        .filter_map(|(p, &c)| loc_f.interpolate(fine, psi_f, *p).map(|f| (c, f)))
        .collect();
    let s = if vals.iter().map(|(c, f)| c * f).sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
    vals.iter().map(|(c, f)| (s * f - c).abs()).fold(0.0, f64::max) / 3.0
}

/// All eigenfunction checks for a domain with a Lyapunov set.
#[allow(clippy::too_many_arguments)]
pub fn analyze_eigenfunction(
    curve: &BoundaryCurve,
    sp: &SpecialPoints,
    lset: &LyapunovSet,
    mesh: &TriMesh,
    psi: &[f64],
    multiplicity: Multiplicity,
    tol: f64,
    tol_angle: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<EigenfunctionAnalysis, SpectralError> {
    if multiplicity == Multiplicity::Unresolved {
        return Err(SpectralError::MultiplicityUnresolved);
    }
    let loc = Locator::new(mesh);
    let regions = Regions::new(sp);
    let mono = monotonicity(curve, lset, mesh, &loc, psi, tol, n_pairs, seed);
    let sign = sign_regions(mesh, &regions, psi, mono.sign, tol);
    let cone = gradient_cone(mesh, &regions, psi, mono.sign, sp.alpha, tol_angle);
    let nodal = nodal_polyline(mesh, psi);
    let nodal_in_regions = nodal
        .iter()
        .flat_map(|s| s.iter())
        .filter(|p| regions.left(**p) > mesh.h || regions.right(**p) > mesh.h)
        .count();
    Ok(EigenfunctionAnalysis {
        multiplicity,
        monotonicity: mono,
        sign,
        cone,
        hot_spots: hot_spots(mesh, psi),
        nodal,
        nodal_in_regions,
    })
}
