//! Neumann Laplacian on a triangle mesh: Delaunay meshing, P1 finite
//! elements, smallest eigenpairs, mesh-ladder extrapolation, and checks of
//! the second eigenfunction.

mod analysis;
mod eigen;
mod fem;
mod heat;
mod mesh;
pub mod sparse;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use analysis::{
    analyze_eigenfunction, eigenfunction_error, gradient_cone, hot_spots, monotonicity, nodal_polyline, sign_regions,
    ConeReport, EigenfunctionAnalysis, HotSpots, MonotonicityReport, Regions, SignReport,
};
pub use eigen::{eigen_smallest, EigenOptions, EigenReport, ITERATION_CAP};
pub use fem::{assemble_fem, element_matrices};
pub use heat::{heat_cross_check, heat_fem, heat_mc, Bump, HeatConfig, HeatRow};
pub use mesh::{triangulate, Locator, TriMesh, MIN_ANGLE_DEG};
pub use sparse::{pcg, Csr};

use crate::geometry::BoundaryCurve;
use crate::math;
use crate::par;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("mesh size {h} must be positive and below a tenth of the diameter")]
    BadMeshSize { h: f64 },
    #[error("mesh quality below the angle bound after retries (min angle {min_angle:.2} deg)")]
    MeshQualityFailure { min_angle: f64 },
    #[error("degenerate triangle {index}")]
    DegenerateTriangle { index: usize },
    #[error("eigen solver needs k >= 3, got {k}")]
    BadEigenCount { k: usize },
    #[error("eigen solver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("second eigenvalue multiplicity unresolved")]
    MultiplicityUnresolved,
    #[error("a mesh ladder needs at least two levels")]
    ShortLadder,
}

/// Default shift of the inverse iteration: a twentieth of the scale
/// `(pi / diam)^2` of the first nonzero eigenvalue.
pub fn default_shift(curve: &BoundaryCurve) -> f64 {
    let s = math::PI / curve.diameter();
    0.05 * s * s
}

/// Smooth starting block: low-degree monomials in centered coordinates.
pub fn smooth_block(mesh: &TriMesh, count: usize) -> Vec<Vec<f64>> {
    let n = mesh.n_vertices() as f64;
    let c = mesh.vertices.iter().fold(crate::Vec2::ZERO, |a, &p| a + p) / n;
    let mut out = Vec::with_capacity(count);
    'deg: for d in 1.. {
        for i in 0..=d {
            if out.len() == count {
                break 'deg;
            }
            let j = d - i;
            out.push(
                mesh.vertices
                    .iter()
                    .map(|p| math::powi(p.x - c.x, i) * math::powi(p.y - c.y, j))
                    .collect(),
            );
        }
    }
    out
}

/// Mesh, assemble and solve at one mesh size.
pub fn solve_level(curve: &BoundaryCurve, h: f64, k: usize) -> Result<(TriMesh, EigenReport), SpectralError> {
    let mesh = triangulate(curve, h)?;
    let (kk, mm) = assemble_fem(&mesh)?;
    let opts = EigenOptions::new(k, default_shift(curve));
    let init = smooth_block(&mesh, k - 1 + opts.guard);
    let rep = eigen_smallest(&kk, &mm, &opts, &init)?;
    Ok((mesh, rep))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    Simple,
    Double,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub h: f64,
    pub n_vertices: usize,
    pub n_triangles: usize,
    pub min_angle_deg: f64,
    pub mu: Vec<f64>,
    pub gap_ratio: f64,
    pub max_residual: f64,
    pub gram_residual: f64,
    pub iterations: usize,
}

/// Extrapolation from one pair of consecutive levels `(h, h/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairExtrapolation {
    pub h_coarse: f64,
    pub h_fine: f64,
    pub mu2: f64,
    pub mu3: f64,
    /// `|mu(h/2) - mu(h)| / 3` for `mu2` and `mu3`.
    pub mu2_error: f64,
    pub mu3_error: f64,
    pub gap_ratio: f64,
    /// Error estimate of `gap_ratio` from the two eigenvalue errors.
    pub gap_error: f64,
    pub verdict: Multiplicity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub levels: Vec<LevelSummary>,
    pub pairs: Vec<PairExtrapolation>,
    /// Verdict of the finest pair.
    pub verdict: Multiplicity,
    /// All pairs agree.
    pub stable: bool,
    /// Observed convergence order of `mu2` from the last three levels.
    pub order_mu2: Option<f64>,
}

fn extrapolate(c: &LevelSummary, f: &LevelSummary) -> PairExtrapolation {
    let r = |a: f64, b: f64| (4.0 * b - a) / 3.0;
    let mu2 = r(c.mu[1], f.mu[1]);
    let mu3 = r(c.mu[2], f.mu[2]);
    let e2 = (f.mu[1] - c.mu[1]).abs() / 3.0;
    let e3 = (f.mu[2] - c.mu[2]).abs() / 3.0;
    let gap_ratio = (mu3 - mu2) / mu2;
    let gap_error = (e2 + e3) / mu2;
    let verdict = if gap_ratio > 10.0 * gap_error {
        Multiplicity::Simple
    } else if gap_ratio.abs() < gap_error {
        Multiplicity::Double
    } else {
        Multiplicity::Unresolved
    };
    PairExtrapolation { h_coarse: c.h, h_fine: f.h, mu2, mu3, mu2_error: e2, mu3_error: e3, gap_ratio, gap_error, verdict }
}

/// Solves every level of `hs` (coarse to fine, each half the previous) and
/// extrapolates consecutive pairs.
pub fn eigen_ladder(
    curve: &BoundaryCurve,
    hs: &[f64],
    k: usize,
) -> Result<(LadderReport, Vec<(TriMesh, EigenReport)>), SpectralError> {
    if hs.len() < 2 {
        return Err(SpectralError::ShortLadder);
    }
    let solved: Vec<(TriMesh, EigenReport)> =
        par::map(hs, |&h| solve_level(curve, h, k)).into_iter().collect::<Result<_, _>>()?;
    let levels: Vec<LevelSummary> = solved
        .iter()
        .map(|(mesh, r)| LevelSummary {
            h: mesh.h,
            n_vertices: mesh.n_vertices(),
            n_triangles: mesh.triangles.len(),
            min_angle_deg: mesh.min_angle_deg(),
            mu: r.mu.clone(),
            gap_ratio: r.gap_ratio,
            max_residual: r.residuals.iter().cloned().fold(0.0, f64::max),
            gram_residual: r.gram_residual,
            iterations: r.iterations,
        })
        .collect();
    let pairs: Vec<PairExtrapolation> = levels.windows(2).map(|w| extrapolate(&w[0], &w[1])).collect();
    let verdict = pairs.last().unwrap().verdict;
    let stable = pairs.iter().all(|p| p.verdict == verdict);
    let order_mu2 = (levels.len() >= 3).then(|| {
        let l = &levels[levels.len() - 3..];
        let d1 = (l[1].mu[1] - l[0].mu[1]).abs();
        let d2 = (l[2].mu[1] - l[1].mu[1]).abs();
        math::ln(d1 / d2) / math::ln(l[0].h / l[1].h)
    });
    Ok((LadderReport { levels, pairs, verdict, stable, order_mu2 }, solved))
}

#[cfg(test)]
mod tests;
