use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::sparse::{axpy, dot, pcg, Csr};
use super::SpectralError;
use crate::math;

pub const ITERATION_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Number of eigenpairs, the constant mode included.
    pub k: usize,
    /// Extra block vectors beyond the wanted ones.
    pub guard: usize,
    pub shift: f64,
    pub tol_value: f64,
    pub tol_residual: f64,
    pub cg_tol: f64,
}

impl EigenOptions {
    pub fn new(k: usize, shift: f64) -> Self {
        EigenOptions { k, guard: 2, shift, tol_value: 1e-10, tol_residual: 1e-8, cg_tol: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    /// Ascending; the first is the constant mode.
    pub mu: Vec<f64>,
    /// M-orthonormal, vertex-valued.
    pub vectors: Vec<Vec<f64>>,
    /// `|K v - mu M v| / |M v|` per pair.
    pub residuals: Vec<f64>,
    /// Largest entry of `V^T M V - I`.
    pub gram_residual: f64,
    /// `(mu_3 - mu_2) / mu_2`.
    pub gap_ratio: f64,
    pub iterations: usize,
    pub cg_iterations: usize,
}

fn m_dot(m: &Csr, a: &[f64], b: &[f64], tmp: &mut [f64]) -> f64 {
    m.mul_into(b, tmp);
    dot(a, tmp)
}

/// Rayleigh-Ritz on the span of `w`: returns Ritz values and M-orthonormal
/// Ritz vectors, ascending.
fn rayleigh_ritz(k: &Csr, m: &Csr, w: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectralError> {
    let b = w.len();
    let n = k.n;
    let kw: Vec<Vec<f64>> = w.iter().map(|v| k.mul(v)).collect();
    let mw: Vec<Vec<f64>> = w.iter().map(|v| m.mul(v)).collect();
    let mut a = DMatrix::<f64>::zeros(b, b);
    let mut g = DMatrix::<f64>::zeros(b, b);
    for i in 0..b {
        for j in i..b {
            let aij = 0.5 * (dot(&w[i], &kw[j]) + dot(&w[j], &kw[i]));
            let gij = 0.5 * (dot(&w[i], &mw[j]) + dot(&w[j], &mw[i]));
            a[(i, j)] = aij;
            a[(j, i)] = aij;
            g[(i, j)] = gij;
            g[(j, i)] = gij;
        }
    }
    let l = g.cholesky().ok_or(SpectralError::NoConvergence { iterations: 0 })?.l();
    let li = l.clone().try_inverse().ok_or(SpectralError::NoConvergence { iterations: 0 })?;
    let c = &li * &a * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    // coefficients in the w basis: L^{-T} y
    let coef = li.transpose() * &eig.eigenvectors;
    let mut vals = Vec::with_capacity(b);
    let mut vecs = Vec::with_capacity(b);
    for &o in &order {
        vals.push(eig.eigenvalues[o]);
        let mut v = vec![0.0; n];
        for j in 0..b {
            axpy(coef[(j, o)], &w[j], &mut v);
        }
        vecs.push(v);
    }
    Ok((vals, vecs))
}

fn deflate_constant(m: &Csr, c: &[f64], v: &mut [f64], tmp: &mut [f64]) {
    let a = m_dot(m, c, v, tmp);
    axpy(-a, c, v);
}

/// The `opts.k` smallest eigenpairs of `K v = mu M v` by block inverse
/// iteration on `K + shift M` with Rayleigh-Ritz, the constant mode
/// deflated and converged pairs locked. `init` seeds the block (smooth
/// vectors converge fastest); missing columns get pseudo-random fill.
pub fn eigen_smallest(k: &Csr, m: &Csr, opts: &EigenOptions, init: &[Vec<f64>]) -> Result<EigenReport, SpectralError> {
    if opts.k < 3 {
        return Err(SpectralError::BadEigenCount { k: opts.k });
    }
    let n = k.n;
    let mut tmp = vec![0.0; n];
    let ones = vec![1.0; n];
    let total = m_dot(m, &ones, &ones, &mut tmp);
    let c: Vec<f64> = ones.iter().map(|x| x / math::sqrt(total)).collect();
    let want = opts.k - 1;
    let b = want + opts.guard;
    let a = k.combine(1.0, m, opts.shift);
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();

    let mut rng = crate::coupling::path_rng(0x5eed, 0);
    let unit = rand_distr::Uniform::new(-0.5, 0.5).unwrap();
    let mut w: Vec<Vec<f64>> = Vec::with_capacity(b);
    for j in 0..b {
        let v = if j < init.len() {
            init[j].clone()
        } else {
            (0..n).map(|_| rand_distr::Distribution::sample(&unit, &mut rng)).collect()
        };
        w.push(v);
    }
    let mut theta = vec![f64::INFINITY; b];
    let mut locked = vec![false; b];
    let mut cg_total = 0usize;
    for iter in 1..=ITERATION_CAP {
        for v in w.iter_mut() {
            deflate_constant(m, &c, v, &mut tmp);
        }
        let (vals, vecs) = rayleigh_ritz(k, m, &w)?;
        let mut all = true;
        let mut residuals = Vec::with_capacity(want);
        for i in 0..b {
            let kv = k.mul(&vecs[i]);
            let mv = m.mul(&vecs[i]);
            let r: f64 = kv.iter().zip(&mv).map(|(x, y)| (x - vals[i] * y).powi(2)).sum::<f64>();
            let res = math::sqrt(r) / math::sqrt(dot(&mv, &mv));
            let change = (vals[i] - theta[i]).abs() / vals[i].abs().max(1e-300);
            let ok = res < opts.tol_residual && change < opts.tol_value;
            if i < want {
                residuals.push(res);
                all &= ok;
            }
            locked[i] = ok;
        }
        theta = vals;
        if all {
            let mut mu = vec![m_dot(k, &c, &c, &mut tmp)];
            mu.extend_from_slice(&theta[..want]);
            let mut vectors = vec![c.clone()];
            vectors.extend(vecs.into_iter().take(want));
            let mut res_all = vec![{
                let kc = k.mul(&c);
                math::sqrt(dot(&kc, &kc)) / math::sqrt(dot(&m.mul(&c), &m.mul(&c)))
            }];
            res_all.extend(residuals);
            let mut gram: f64 = 0.0;
            for i in 0..vectors.len() {
                for j in i..vectors.len() {
                    let g = m_dot(m, &vectors[i], &vectors[j], &mut tmp) - if i == j { 1.0 } else { 0.0 };
                    gram = gram.max(g.abs());
                }
            }
            return Ok(EigenReport {
                gap_ratio: (mu[2] - mu[1]) / mu[1],
                mu,
                vectors,
                residuals: res_all,
                gram_residual: gram,
                iterations: iter,
                cg_iterations: cg_total,
            });
        }
        let mut next = Vec::with_capacity(b);
        for (i, v) in vecs.into_iter().enumerate() {
            if locked[i] {
                next.push(v);
                continue;
            }
            let rhs = m.mul(&v);
            let mut x: Vec<f64> = v.iter().map(|e| e / (theta[i] + opts.shift)).collect();
            match pcg(&a, &inv_diag, &rhs, &mut x, opts.cg_tol, 20 * n + 1000) {
                Some(its) => cg_total += its,
                None => return Err(SpectralError::NoConvergence { iterations: iter }),
            }
            next.push(x);
        }
        w = next;
    }
    Err(SpectralError::NoConvergence { iterations: ITERATION_CAP })
}
