use mirror_core::assumptions::{check_a1, check_all, check_with_points, Resolutions, Verdict};
use mirror_core::domains;
use mirror_core::geometry::fillet_smooth;
use mirror_core::hinges::{compute_special_points, BoundaryScan};
use std::f64::consts::FRAC_PI_4;

#[test]
fn example1_passes_all() {
    let c = domains::example1();
    let r = check_all(&c, FRAC_PI_4, &Resolutions::default()).unwrap();
    for (name, v) in r.verdicts() {
        assert!(v.is_pass(), "{name}: {v:?}");
    }
    assert!(r.nu_found.unwrap() >= 0.001);
}

#[test]
fn disk_fails_with_reproducible_witnesses() {
    let c = domains::disk(1.0);
    let res = Resolutions::default();
    let r = check_all(&c, FRAC_PI_4, &res).unwrap();
    let Verdict::Fail(w) = &r.a1 else { panic!("{:?}", r.a1) };
    // the witness chord carries a lower-left or upper-right hinge
    let k = BoundaryScan::new(&c, res.hinge_samples).hinge_kinds(&c, &w.chord);
    assert!(k.lower_left.is_some() || k.upper_right.is_some());
    assert!(r.a4.is_fail());
    // determinism
    assert_eq!(r, check_all(&c, FRAC_PI_4, &res).unwrap());
}

#[test]
fn square_fails_margin_check() {
    let r = check_all(&domains::unit_square(), FRAC_PI_4, &Resolutions::default()).unwrap();
    assert!(r.a2.is_fail());
}

#[test]
fn smoothed_example1_keeps_activity_condition() {
    let c = fillet_smooth(&domains::example1(), 0.05).unwrap();
    let sp = compute_special_points(&c, FRAC_PI_4).unwrap();
    assert!(check_a1(&c, &sp, &Resolutions::default()).is_pass());
}

#[test]
fn refinement_does_not_turn_fail_into_pass() {
    let c = domains::disk(1.0);
    let coarse = Resolutions { a1_grid: 10, family_grid: 5, ..Resolutions::default() };
    let a = check_all(&c, FRAC_PI_4, &coarse).unwrap();
    let b = check_all(&c, FRAC_PI_4, &coarse.doubled()).unwrap();
    for ((_, va), (_, vb)) in a.verdicts().iter().zip(b.verdicts().iter()) {
        if va.is_fail() {
            assert!(vb.is_fail());
        }
    }
}

#[test]
fn low_resolution_report_is_deterministic() {
    let c = domains::example1();
    let sp = compute_special_points(&c, FRAC_PI_4).unwrap();
    let res = Resolutions { a1_grid: 6, a1_scan: 50, a2_positions: 6, a2_nu_max: 0.003, family_grid: 4, a5_grid: 4, ..Resolutions::default() };
    let r = check_with_points(&c, &sp, &res).unwrap();
    assert!(r.all_pass(), "{r:?}");
    assert_eq!(r, check_with_points(&c, &sp, &res).unwrap());
}
