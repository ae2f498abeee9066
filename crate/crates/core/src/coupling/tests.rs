use super::*;
use crate::domains;
use crate::hinges::compute_special_points;
use crate::lyapunov::assemble;
use crate::math;

fn example1() -> (BoundaryCurve, SpecialPoints, LyapunovSet) {
    let c = domains::example1();
    let sp = compute_special_points(&c, math::FRAC_PI_4).unwrap();
    let l = assemble(&c, &sp).unwrap();
    (c, sp, l)
}

#[test]
fn interior_step_is_plain_translation() {
    let c = domains::disk(1.0);
    let r = step_reflected(&c, Vec2::new(0.1, 0.2), Vec2::new(0.05, -0.03)).unwrap();
    assert_eq!(r.x, Vec2::new(0.1, 0.2) + Vec2::new(0.05, -0.03));
    assert_eq!(r.dl, 0.0);
    assert!(r.normal.is_none());
}

#[test]
fn disk_boundary_push_is_radial() {
    let c = domains::disk(1.0);
    let r = step_reflected(&c, Vec2::new(1.0, 0.0), Vec2::new(0.1, 0.0)).unwrap();
    assert!((r.x - Vec2::new(1.0, 0.0)).norm() < 1e-12);
    assert!((r.dl - 0.1).abs() < 1e-12);
    assert!((r.normal.unwrap() - Vec2::new(-1.0, 0.0)).norm() < 1e-9);
}

#[test]
fn oversized_increment_is_rejected() {
    let c = domains::disk(1.0);
    assert!(matches!(step_reflected(&c, Vec2::ZERO, Vec2::new(0.6, 0.0)), Err(CouplingError::StepTooLarge { .. })));
}

#[test]
fn interior_steps_keep_the_mirror() {
    let c = domains::disk(1.0);
    let s = CouplingState::start(&c, None, Vec2::new(-0.1, 0.05), Vec2::new(0.2, 0.1)).unwrap();
    let out = step_coupling(&c, None, &s, Vec2::new(0.013, -0.021), 1e-4, 0.03).unwrap();
    assert!((out.state.m - s.m).norm() < 1e-12);
    let dw = Vec2::new(0.013, -0.021);
    assert!((out.state.v - (s.v - 2.0 * s.m.dot(dw))).abs() < 1e-12);
    // both points stay on opposite sides of the same bisector
    let mid = (s.x + s.y) * 0.5;
    assert!(((out.state.x - mid).norm() - (out.state.y - mid).norm()).abs() < 1e-12);
}

#[test]
fn close_pair_couples_and_stays_coupled() {
    let c = domains::disk(1.0);
    let cfg = SimConfig::new(1e-4, 0.2, 3);
    let s = CouplingState::start(&c, None, Vec2::new(0.0, 0.0), Vec2::new(0.02, 0.0)).unwrap();
    let out = step_coupling(&c, None, &s, Vec2::new(0.001, 0.0), cfg.dt, cfg.eps_couple).unwrap();
    assert!(out.state.coupled);
    assert_eq!(out.state.x, out.state.y);
    let cfg = SimConfig { stop_at_coupling: false, record_stride: 1, ..cfg };
    let rec = simulate(&c, None, None, Vec2::new(0.0, 0.0), Vec2::new(0.02, 0.0), &cfg, 0).unwrap();
    assert!(rec.zeta.is_some());
    let z = rec.zeta.unwrap();
    assert!(rec.samples.iter().filter(|s| s.t >= z).all(|s| s.x == s.y && s.coupled));
}

#[test]
fn paths_are_determined_by_seed_and_stream() {
    let c = domains::disk(1.0);
    let cfg = SimConfig { record_stride: 10, ..SimConfig::new(1e-3, 0.5, 42) };
    let (x, y) = (Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.1));
    let a = simulate(&c, None, None, x, y, &cfg, 7).unwrap();
    let b = simulate(&c, None, None, x, y, &cfg, 7).unwrap();
    let d = simulate(&c, None, None, x, y, &cfg, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.final_state, d.final_state);
}

#[test]
fn distance_is_dominated_by_its_martingale_part() {
    let c = domains::example1();
    let cfg = SimConfig { stop_at_coupling: true, ..SimConfig::new(1e-4, 1.0, 5) };
    for stream in 0..20 {
        let rec = simulate(&c, None, None, Vec2::new(-0.8, 0.0), Vec2::new(0.9, 0.2), &cfg, stream).unwrap();
        assert!(rec.max_domination_excess < 1e-9, "excess {}", rec.max_domination_excess);
    }
}

#[test]
fn symmetric_disk_pair_keeps_its_mirror() {
    let c = domains::disk(1.0);
    let cfg = SimConfig { record_stride: 1, stop_at_coupling: false, ..SimConfig::new(1e-4, 0.5, 9) };
    let rec = simulate(&c, None, None, Vec2::new(-0.4, 0.0), Vec2::new(0.4, 0.0), &cfg, 0).unwrap();
    for s in rec.samples.iter().filter(|s| !s.coupled) {
        // a diameter mirror of the disk maps the disk to itself
        assert!((s.x + s.y).dot(s.m).abs() < 1e-9);
    }
}

#[test]
fn chart_point_is_frozen_off_the_boundary() {
    let (c, sp, l) = example1();
    let u = UPoint::new(2.0, 2.5);
    assert!(l.contains(u));
    let ch = sp.phi_inv(&c, u).unwrap();
    let mid = (ch.p_pt + ch.q_pt) * 0.5;
    let (x, y) = (mid - ch.m * 0.2, mid + ch.m * 0.2);
    // short horizon: no boundary contact
    let cfg = SimConfig { record_stride: 1, ..SimConfig::new(1e-5, 1e-3, 1) };
    let rec = simulate(&c, Some(&sp), Some(&l), x, y, &cfg, 0).unwrap();
    let u0 = rec.samples[0].u.unwrap();
    assert!((u0.u1 - u.u1).abs() < 1e-8 && (u0.u2 - u.u2).abs() < 1e-8);
    assert!(rec.samples.iter().all(|s| s.u == Some(u0)));
    assert_eq!(rec.drift.interior_moves, 0);
}

#[test]
fn boundary_step_moves_angle_as_predicted() {
    let c = domains::example1();
    let s0 = 0.3 * c.total_length();
    let x = c.point_at(s0);
    let n = c.normal_one_sided(s0);
    let dir = Vec2::new(n.x * 0.866 - n.y * 0.5, n.x * 0.5 + n.y * 0.866);
    let y = x + dir * 0.6;
    let s = CouplingState::start(&c, None, x, y).unwrap();
    let out = step_coupling(&c, None, &s, n * -1e-3, 1e-6, 1e-4).unwrap();
    assert!(out.dl > 0.0 && out.dm == 0.0);
    let pred = -s.m.perp().dot(out.n_x.unwrap()) * out.dl / s.v;
    let got = out.state.theta - s.theta;
    assert!(pred.abs() > 1e-5);
    assert!((got - pred).abs() < 0.05 * pred.abs(), "got {got} pred {pred}");
}

#[test]
fn mirror_chart_agrees_with_set_coordinates() {
    let (c, sp, l) = example1();
    let starts = start_pairs(&c, &l, 20, 0.9, 0.2, 0.5);
    assert_eq!(starts.len(), 20);
    for (x, y) in starts {
        assert!(l.pair_in_t(&c, x, y).unwrap());
        let s = CouplingState::start(&c, Some(&sp), x, y).unwrap();
        assert!(l.contains(s.u.unwrap()));
    }
}

#[test]
fn short_ladder_has_no_interior_chart_moves() {
    let (c, sp, l) = example1();
    let starts = start_pairs(&c, &l, 4, 1.0, 0.05, 0.03);
    let r = invariance_mc(&c, &sp, &l, &starts, &[SimConfig::new(1e-3, 1.0, 11)], 25).unwrap();
    let lv = &r.levels[0];
    assert_eq!(lv.n_paths, 100);
    assert_eq!(lv.exit_fraction, lv.n_exited as f64 / lv.n_paths as f64);
    assert_eq!(lv.drift.interior_moves, 0);
    assert!(lv.drift.steps > 0);
}

