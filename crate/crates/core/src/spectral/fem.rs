use super::{Csr, SpectralError, TriMesh};

/// P1 element matrices of a triangle: stiffness (gradient form) and
/// consistent mass.
pub fn element_matrices(a: crate::Vec2, b: crate::Vec2, c: crate::Vec2) -> Result<([[f64; 3]; 3], [[f64; 3]; 3]), SpectralError> {
    let area = 0.5 * (b - a).cross(c - a);
    if !(area > 0.0) {
        return Err(SpectralError::DegenerateTriangle { index: 0 });
    }
    // rotated opposite edges are the scaled basis gradients
    let g = [(c - b).perp(), (a - c).perp(), (b - a).perp()];
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = g[i].dot(g[j]) / (4.0 * area);
            m[i][j] = area / if i == j { 6.0 } else { 12.0 };
        }
    }
    Ok((k, m))
}

/// Stiffness and consistent mass matrices of the Neumann problem.
pub fn assemble_fem(mesh: &TriMesh) -> Result<(Csr, Csr), SpectralError> {
    let n = mesh.n_vertices();
    let mut k = Csr::pattern(n, &mesh.triangles);
    let mut m = k.clone();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = mesh.corners(t);
        let (ke, me) = element_matrices(a, b, c).map_err(|_| SpectralError::DegenerateTriangle { index: t })?;
        for i in 0..3 {
            for j in 0..3 {
                k.add(tri[i] as usize, tri[j] as usize, ke[i][j]);
                m.add(tri[i] as usize, tri[j] as usize, me[i][j]);
            }
        }
    }
    Ok((k, m))
}
