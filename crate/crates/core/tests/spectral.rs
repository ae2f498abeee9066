use mirror_core::hinges::compute_special_points;
use mirror_core::lyapunov::assemble;
use mirror_core::spectral::{
    analyze_eigenfunction, eigen_ladder, eigenfunction_error, heat_cross_check, hot_spots, Bump, HeatConfig,
    Locator, Multiplicity, SpectralError,
};
use mirror_core::{domains, Vec2};
use std::f64::consts::{FRAC_PI_4, PI};

#[test]
fn rectangle_ladder_converges_to_a_simple_cosine_mode() {
    let (rep, _) = eigen_ladder(&domains::rectangle(1.0, 2.0), &[0.1, 0.05, 0.025], 3).unwrap();
    let exact = PI * PI / 4.0;
    let fin = rep.pairs.last().unwrap();
    assert!((fin.mu2 - exact).abs() / exact < 1e-3, "{}", fin.mu2);
    assert_eq!(rep.verdict, Multiplicity::Simple);
    assert!(rep.stable);
    // P1 elements converge at second order
    let order = rep.order_mu2.unwrap();
    assert!((1.6..2.4).contains(&order), "{order}");
    // the raw levels approach the limit from above
    for l in &rep.levels {
        assert!(l.mu[1] >= exact * (1.0 - 1e-6));
    }
}

#[test]
fn symmetric_domains_report_double_eigenvalues() {
    for curve in [domains::disk(1.0), domains::unit_square()] {
        let (rep, _) = eigen_ladder(&curve, &[0.1, 0.05], 3).unwrap();
        assert_eq!(rep.verdict, Multiplicity::Double, "{:?}", rep.pairs);
    }
}

#[test]
fn a_single_level_is_not_a_ladder() {
    assert!(matches!(eigen_ladder(&domains::unit_square(), &[0.1], 3), Err(SpectralError::ShortLadder)));
}

#[test]
fn example1_eigenfunction_passes_the_coarse_checks() {
    let c = domains::example1();
    let sp = compute_special_points(&c, FRAC_PI_4).unwrap();
    let l = assemble(&c, &sp).unwrap();
    let (rep, solved) = eigen_ladder(&c, &[0.2, 0.1], 3).unwrap();
    assert_eq!(rep.verdict, Multiplicity::Simple);
    let ((coarse, rc), (fine, rf)) = (&solved[0], &solved[1]);
    let tol = eigenfunction_error(coarse, &rc.vectors[1], fine, &Locator::new(fine), &rf.vectors[1]);
    assert!(tol > 0.0 && tol < 0.1, "{tol}");
    let a = analyze_eigenfunction(&c, &sp, &l, fine, &rf.vectors[1], rep.verdict, tol, 0.01, 2000, 3).unwrap();
    assert!(a.monotonicity.fraction >= 0.99, "{:?}", a.monotonicity);
    assert!(a.sign.violating_fraction <= 0.01, "{:?}", a.sign);
    assert!(a.cone.fraction >= 0.95, "{}", a.cone.fraction);
    assert!(a.hot_spots.max_on_boundary && a.hot_spots.min_on_boundary);
    assert!(!a.nodal.is_empty());

    // an unresolved multiplicity stops the analysis
    let err = analyze_eigenfunction(&c, &sp, &l, fine, &rf.vectors[1], Multiplicity::Unresolved, tol, 0.01, 10, 3);
    assert!(matches!(err, Err(SpectralError::MultiplicityUnresolved)));
}

#[test]
fn example2_hot_spots_lie_on_the_boundary() {
    let (_, solved) = eigen_ladder(&domains::example2(), &[0.1, 0.05], 3).unwrap();
    for (mesh, r) in &solved {
        let hs = hot_spots(mesh, &r.vectors[1]);
        assert!(hs.max_on_boundary && hs.min_on_boundary, "h {}", mesh.h);
    }
}

#[test]
fn heat_solution_matches_its_monte_carlo_representation() {
    let cfg = HeatConfig {
        bump: Bump { center: Vec2::new(0.5, 0.3), radius: 0.8, amplitude: 1.0 },
        t: 0.5,
        h: 0.2,
        dt_fem: 0.01,
        dt_mc: 1e-3,
        mc_paths: 3000,
        seed: 17,
    };
    let xs = [Vec2::new(0.5, 0.3), Vec2::new(-1.0, 0.0), Vec2::new(1.5, 0.5)];
    for r in heat_cross_check(&domains::example1(), &xs, &cfg).unwrap() {
        assert!(r.agrees, "{r:?}");
    }
}
