use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::sparse::{pcg, Csr};
use super::{Locator, SpectralError, TriMesh};
use crate::coupling::{gaussian_step, path_rng, step_reflected, CouplingError};
use crate::geometry::BoundaryCurve;
use crate::math;
use crate::par;
use crate::vec2::Vec2;

/// Radial bump `amplitude (1 - (r / radius)^2)^3` inside the radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec2,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn eval(&self, x: Vec2) -> f64 {
        let q = (x - self.center).norm2() / (self.radius * self.radius);
        if q >= 1.0 {
            0.0
        } else {
            let w = 1.0 - q;
            self.amplitude * w * w * w
        }
    }

    /// Integral over the plane.
    pub fn integral(&self) -> f64 {
        self.amplitude * math::PI * self.radius * self.radius / 4.0
    }
}

/// Implicit Euler for `u_t = (1/2) Lap u` with Neumann conditions:
/// `(M + dt K / 2) u_{n+1} = M u_n`, from the nodal interpolant of `f0`.
pub fn heat_fem(mesh: &TriMesh, k: &Csr, m: &Csr, f0: &Bump, t: f64, dt: f64) -> Result<Vec<f64>, SpectralError> {
    let steps = math::round(t / dt).max(0.0) as usize;
    let a = m.combine(1.0, k, 0.5 * dt);
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut u: Vec<f64> = mesh.vertices.iter().map(|p| f0.eval(*p)).collect();
    for i in 0..steps {
        let rhs = m.mul(&u);
        pcg(&a, &inv_diag, &rhs, &mut u, 1e-12, 10 * mesh.n_vertices() + 100)
            .ok_or(SpectralError::NoConvergence { iterations: i })?;
    }
    Ok(u)
}

/// Mean of `f0(X(t))` over reflected paths from `x`, with its standard error.
pub fn heat_mc(curve: &BoundaryCurve, f0: &Bump, x: Vec2, t: f64, dt: f64, n_paths: usize, seed: u64) -> Result<(f64, f64), CouplingError> {
    let idx: Vec<u64> = (0..n_paths as u64).collect();
    let steps = math::round(t / dt) as usize;
    let sd = math::sqrt(dt);
    let vals = par::map(&idx, |&i| -> Result<f64, CouplingError> {
        let mut rng = path_rng(seed, i);
        let mut z = x;
        for _ in 0..steps {
            z = step_reflected(curve, z, gaussian_step(&mut rng, sd))?.x;
        }
        Ok(f0.eval(z))
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_, _>>()?;
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, math::sqrt(var / n)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatRow {
    pub x: Vec2,
    pub fem: f64,
    /// `|fem(h, dt) - fem(h/2, dt/4)| / 3`.
    pub mesh_error: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub diff: f64,
    /// `diff <= 3 (mc_stderr + mesh_error)`.
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatConfig {
    pub bump: Bump,
    pub t: f64,
    /// Coarse mesh size and time step; the fine level uses `h/2, dt/4`.
    pub h: f64,
    pub dt_fem: f64,
    pub dt_mc: f64,
    pub mc_paths: usize,
    pub seed: u64,
}

/// FEM heat solution at two levels against Monte Carlo at each point.
pub fn heat_cross_check(curve: &BoundaryCurve, x_eval: &[Vec2], cfg: &HeatConfig) -> Result<Vec<HeatRow>, SpectralError> {
    let mut sols = Vec::new();
    for (h, dt) in [(cfg.h, cfg.dt_fem), (0.5 * cfg.h, 0.25 * cfg.dt_fem)] {
        let mesh = super::triangulate(curve, h)?;
        let (k, m) = super::assemble_fem(&mesh)?;
        let u = heat_fem(&mesh, &k, &m, &cfg.bump, cfg.t, dt)?;
        let loc = Locator::new(&mesh);
        sols.push((mesh, loc, u));
    }
    let mut rows = Vec::new();
    for (i, &x) in x_eval.iter().enumerate() {
        let at = |k: usize| sols[k].1.interpolate(&sols[k].0, &sols[k].2, x).unwrap_or(f64::NAN);
        let (coarse, fine) = (at(0), at(1));
        let mesh_error = (fine - coarse).abs() / 3.0;
        let (mc, se) = heat_mc(curve, &cfg.bump, x, cfg.t, cfg.dt_mc, cfg.mc_paths, cfg.seed.wrapping_add(i as u64))
            .map_err(|_| SpectralError::NoConvergence { iterations: 0 })?;
        let diff = (fine - mc).abs();
        rows.push(HeatRow { x, fem: fine, mesh_error, mc, mc_stderr: se, diff, agrees: diff <= 3.0 * (se + mesh_error) });
    }
    Ok(rows)
}
