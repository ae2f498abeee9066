use alloc::vec;
use alloc::vec::Vec;

/// Compressed sparse row matrix with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Zero matrix on the sparsity pattern of a triangle mesh (vertex graph
    /// plus the diagonal).
    pub fn pattern(n: usize, triangles: &[[u32; 3]]) -> Self {
        let mut adj: Vec<Vec<u32>> = (0..n as u32).map(|i| vec![i]).collect();
        for t in triangles {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        adj[t[i] as usize].push(t[j]);
                    }
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for mut a in adj {
            a.sort_unstable();
            a.dedup();
            cols.extend_from_slice(&a);
            row_ptr.push(cols.len());
        }
        let nnz = cols.len();
        Csr { n, row_ptr, cols, vals: vec![0.0; nnz] }
    }

    fn slot(&self, i: usize, j: u32) -> usize {
        let r = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        self.row_ptr[i] + r.binary_search(&j).expect("entry outside the pattern")
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.slot(i, j as u32);
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match r.binary_search(&(j as u32)) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = s;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_into(x, &mut y);
        y
    }

    /// `a self + b other` for matrices on the same pattern.
    pub fn combine(&self, a: f64, other: &Csr, b: f64) -> Csr {
        assert_eq!(self.cols, other.cols);
        let vals = self.vals.iter().zip(&other.vals).map(|(x, y)| a * x + b * y).collect();
        Csr { n: self.n, row_ptr: self.row_ptr.clone(), cols: self.cols.clone(), vals }
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k] as usize;
                worst = worst.max((self.vals[k] - self.get(j, i)).abs());
            }
        }
        worst
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += a x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Jacobi-preconditioned conjugate gradients from the initial guess in `x`.
/// Stops when `|r| <= rel_tol |b|`; returns the iteration count, or `None`
/// if `max_iter` is hit first.
pub fn pcg(a: &Csr, inv_diag: &[f64], b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Option<usize> {
    let n = a.n;
    let bnorm = math_sqrt(dot(b, b));
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Some(0);
    }
    let mut r = a.mul(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if math_sqrt(dot(&r, &r)) <= rel_tol * bnorm {
            return Some(it);
        }
        a.mul_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (math_sqrt(dot(&r, &r)) <= rel_tol * bnorm).then_some(max_iter)
}

fn math_sqrt(x: f64) -> f64 {
    crate::math::sqrt(x)
}
