use super::*;
use crate::domains;
use crate::math::{self, PI};
use crate::Vec2;
use rand::{Rng, SeedableRng};

#[test]
fn disk_mesh_vertex_count_and_containment() {
    let c = domains::disk(1.0);
    let m = triangulate(&c, 0.1).unwrap();
    let expect = PI / (0.1 * 0.1 * math::sqrt(3.0) / 2.0);
    let n = m.n_vertices() as f64;
    assert!((n - expect).abs() < 0.3 * expect, "{n} vs {expect}");
    for t in 0..m.triangles.len() {
        let [a, b, cc] = m.corners(t);
        assert!(c.in_closure((a + b + cc) / 3.0, 1e-12));
        assert!(m.area_of(t) > 1e-14 * m.h * m.h);
    }
    assert!(m.min_angle_deg() >= MIN_ANGLE_DEG);
    for (p, &b) in m.vertices.iter().zip(&m.boundary) {
        if b {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn square_mesh_partitions_the_square() {
    let m = triangulate(&domains::unit_square(), 0.05).unwrap();
    assert!((m.area() - 1.0).abs() < 1e-9);
}

#[test]
fn mesh_is_delaunay() {
    let m = triangulate(&domains::example1(), 0.2).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let t = rng.random_range(0..m.triangles.len());
        let [a, b, c] = m.corners(t);
        let center = (a + b + c) / 3.0;
        for (i, p) in m.vertices.iter().enumerate() {
            if (*p - center).norm() > 4.0 * m.h || m.triangles[t].contains(&(i as u32)) {
                continue;
            }
            assert!(!m.in_circumcircle(t, *p), "vertex {i} inside circumcircle of {t}");
        }
    }
}

#[test]
fn reference_triangle_element_matrices() {
    let (k, m) = element_matrices(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
    let k_ref = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    let m_ref = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((k[i][j] - k_ref[i][j]).abs() < 1e-15);
            assert!((m[i][j] - m_ref[i][j] / 24.0).abs() < 1e-15);
        }
    }
    assert!(element_matrices(Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)).is_err());
}

#[test]
fn assembled_matrices_have_neumann_structure() {
    let c = domains::example1();
    let mesh = triangulate(&c, 0.2).unwrap();
    let (k, m) = assemble_fem(&mesh).unwrap();
    let ones = alloc::vec![1.0; mesh.n_vertices()];
    assert!(k.mul(&ones).iter().all(|v| v.abs() < 1e-10));
    let total: f64 = m.mul(&ones).iter().sum();
    assert!((total - mesh.area()).abs() < 1e-8);
    assert!(k.asymmetry() < 1e-14 && m.asymmetry() < 1e-14);
}

#[test]
fn rectangle_second_mode_is_the_cosine() {
    let c = domains::rectangle(1.0, 2.0);
    let (mesh, r) = solve_level(&c, 0.05, 4).unwrap();
    assert!(r.mu[0].abs() < 1e-8 * r.mu[1]);
    assert!((r.mu[1] - PI * PI / 4.0).abs() < 0.01 * PI * PI / 4.0);
    assert!(r.residuals.iter().all(|&x| x < 1e-8));
    assert!(r.gram_residual < 1e-8);
    let psi = &r.vectors[1];
    // compare with the normalized cosine up to sign
    let exact: alloc::vec::Vec<f64> = mesh.vertices.iter().map(|p| math::cos(PI * p.y / 2.0)).collect();
    let s = if psi.iter().zip(&exact).map(|(a, b)| a * b).sum::<f64>() > 0.0 { 1.0 } else { -1.0 };
    let scale = psi.iter().zip(&exact).map(|(a, b)| s * a * b).sum::<f64>() / exact.iter().map(|b| b * b).sum::<f64>();
    let err = psi.iter().zip(&exact).map(|(a, b)| (s * a - scale * b).abs()).fold(0.0, f64::max);
    assert!(err < 0.01 * scale, "{err}");
    for seg in nodal_polyline(&mesh, psi) {
        for p in seg {
            assert!((p.y - 1.0).abs() < 0.01);
        }
    }
    let hs = hot_spots(&mesh, psi);
    assert!(hs.max_on_boundary && hs.min_on_boundary);
}

#[test]
fn refinement_does_not_raise_eigenvalues_much() {
    let c = domains::example2();
    let (rep, _) = eigen_ladder(&c, &[0.2, 0.1], 4).unwrap();
    let (a, b) = (&rep.levels[0].mu, &rep.levels[1].mu);
    // non-nested meshes: Galerkin monotonicity only holds approximately
    for i in 1..4 {
        assert!(b[i] <= a[i] * (1.0 + 1e-3), "level mu{} {} -> {}", i + 1, a[i], b[i]);
    }
    assert_eq!(rep.verdict, Multiplicity::Simple);
}

#[test]
fn heat_solution_limits() {
    let c = domains::example1();
    let mesh = triangulate(&c, 0.2).unwrap();
    let (k, m) = assemble_fem(&mesh).unwrap();
    let bump = Bump { center: Vec2::new(0.5, 0.3), radius: 0.8, amplitude: 1.0 };
    let u0 = heat_fem(&mesh, &k, &m, &bump, 0.0, 0.01).unwrap();
    for (p, u) in mesh.vertices.iter().zip(&u0) {
        assert_eq!(*u, bump.eval(*p));
    }
    let (mc, se) = heat_mc(&c, &bump, Vec2::new(0.5, 0.3), 0.0, 1e-3, 10, 1).unwrap();
    assert_eq!((mc, se), (bump.eval(Vec2::new(0.5, 0.3)), 0.0));
    let ones = alloc::vec![1.0; mesh.n_vertices()];
    let mass = |u: &[f64]| sparse::dot(&m.mul(u), &ones);
    let u_inf = heat_fem(&mesh, &k, &m, &bump, 200.0, 1.0).unwrap();
    let mean = mass(&u0) / mesh.area();
    assert!((mass(&u_inf) - mass(&u0)).abs() < 1e-9);
    assert!(u_inf.iter().all(|u| (u - mean).abs() < 1e-3 * mean));
}

#[test]
fn locator_interpolates_linear_functions_exactly() {
    let c = domains::example1();
    let mesh = triangulate(&c, 0.2).unwrap();
    let loc = Locator::new(&mesh);
    let f: alloc::vec::Vec<f64> = mesh.vertices.iter().map(|p| 2.0 * p.x - 0.5 * p.y + 1.0).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut n = 0;
    while n < 500 {
        let p = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-1.5..2.0));
        if c.signed_distance(p) < 0.1 {
            continue;
        }
        n += 1;
        let v = loc.interpolate(&mesh, &f, p).unwrap();
        assert!((v - (2.0 * p.x - 0.5 * p.y + 1.0)).abs() < 1e-10);
    }
    let g = mesh.gradient(0, &f);
    assert!((g - Vec2::new(2.0, -0.5)).norm() < 1e-10);
}

#[test]
fn mesh_size_guard() {
    assert!(matches!(triangulate(&domains::disk(1.0), 0.5), Err(SpectralError::BadMeshSize { .. })));
    assert!(matches!(
        eigen_smallest(&Csr::pattern(1, &[]), &Csr::pattern(1, &[]), &EigenOptions::new(2, 1.0), &[]),
        Err(SpectralError::BadEigenCount { k: 2 })
    ));
}
