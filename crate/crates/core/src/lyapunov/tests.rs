use std::sync::OnceLock;

use super::*;
use crate::domains;
use crate::hinges::{compute_special_points, extremal_points, normal_angle_at};
use crate::math::FRAC_PI_4;

struct Fixture {
    curve: BoundaryCurve,
    sp: SpecialPoints,
    lset: LyapunovSet,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let curve = domains::example1();
        let sp = compute_special_points(&curve, FRAC_PI_4).unwrap();
        let lset = assemble(&curve, &sp).unwrap();
        Fixture { curve, sp, lset }
    })
}

fn dist(a: UPoint, b: UPoint) -> f64 {
    math::hypot(a.u1 - b.u1, a.u2 - b.u2)
}

#[test]
fn alpha_arc_endpoints_angles_and_monotonicity() {
    let f = fixture();
    for (which, start, end, angle) in [
        (Which::Plain, Family::LowerPlain, Family::UpperPlain, f.sp.alpha),
        (Which::Primed, Family::LowerPrime, Family::UpperPrime, f.sp.alpha_prime()),
    ] {
        let arc = arc_alpha(&f.curve, &f.sp, which).unwrap();
        assert_eq!(arc.len(), ALPHA_ARC_SAMPLES);
        assert!(dist(arc[0], family_start(&f.sp, start)) < 1e-8);
        assert!(dist(*arc.last().unwrap(), family_start(&f.sp, end)) < 1e-8);
        for u in &arc[1..arc.len() - 1] {
            let c = f.sp.phi_inv(&f.curve, *u).unwrap();
            assert!((c.angle - angle).abs() < 1e-9);
        }
        let s = if which == Which::Plain { 1.0 } else { -1.0 };
        for w in arc.windows(2) {
            assert!(s * (w[1].u1 - w[0].u1) > 0.0 && s * (w[1].u2 - w[0].u2) > 0.0);
        }
    }
}

#[test]
fn ode_arcs_positive_normal_and_ordered() {
    let f = fixture();
    for arc in &f.lset.ode {
        assert!(arc.min_rhs > 0.0, "{:?}", arc.family);
        assert!(arc.normality <= TOL_NORMAL);
        let (lo, hi) = pivot_range(&f.sp, arc.family);
        let pc = match arc.family {
            Family::LowerPlain | Family::LowerPrime => arc.u_end.u1,
            _ => arc.u_end.u2,
        };
        assert!(lo < pc && pc < hi, "{:?}", arc.family);
        // coordinates move monotonically in the integration direction; the
        // last steps toward the event can be below the resolution of u
        let s = direction(arc.family);
        for w in arc.points.windows(2) {
            assert!(s * (w[1].u1 - w[0].u1) >= 0.0 && s * (w[1].u2 - w[0].u2) >= 0.0);
        }
        let (a, b) = (arc.points[0], arc.u_end);
        assert!(s * (b.u1 - a.u1) > 0.0 && s * (b.u2 - a.u2) > 0.0);
    }
    let u = |p: Option<BoundaryPoint>| p.unwrap().s;
    let sp = &f.lset.special;
    assert!(sp.u2_of_s(sp.plain.q4.s) < sp.u2_of_s(u(sp.plain.q5)));
    assert!(sp.u2_of_s(u(sp.plain.q5)) < sp.ubar2);
    assert!(sp.u1_of_s(u(sp.plain.p5)) < sp.u1_of_s(u(sp.primed.p2)));
    assert!(sp.u2_of_s(u(sp.primed.q2)) < sp.u2_of_s(u(sp.plain.q5)));
}

#[test]
fn upper_arc_angle_stays_above_alpha() {
    let f = fixture();
    for p in &f.lset.ode[1].points[1..] {
        let c = f.sp.phi_inv(&f.curve, *p).unwrap();
        assert!(c.angle > f.sp.alpha);
    }
    for p in &f.lset.ode[3].points[1..] {
        let c = f.sp.phi_inv(&f.curve, *p).unwrap();
        assert!(c.angle < f.sp.alpha_prime());
    }
}

#[test]
fn rhs_ratio_matches_slope_formula() {
    let f = fixture();
    for p in f.lset.ode[1].points.iter().skip(1).step_by(5) {
        let Ok(r) = ode_rhs(&f.curve, &f.sp, *p, Family::UpperPlain) else { continue };
        let c = f.sp.phi_inv(&f.curve, *p).unwrap();
        let e = extremal_points(&f.curve, &c, Family::UpperPlain).unwrap();
        let n = |s: f64| f.curve.normal_one_sided(s);
        let (nl, nr) = (n(e.h_left.s_a), n(e.h_right.s_a));
        let pn_p = c.p.dot(n(c.s_p));
        let pn_q = c.p.dot(n(c.s_q));
        let num = (e.a_left - c.p_pt).dot(nl) + (e.a_right - c.p_pt).dot(nr);
        let den = (e.a_left - c.q_pt).dot(nl) + (e.a_right - c.q_pt).dot(nr);
        let slope = -pn_q / pn_p * num / den;
        assert!((r[0] / r[1] - slope).abs() <= 1e-9 * slope.abs().max(1.0));
    }
}

#[test]
fn closed_end_uses_tangent_parallel_point() {
    let f = fixture();
    // at u4 the right extremal point is where n = i e^{i alpha}
    let c = f.sp.phi_inv(&f.curve, family_start(&f.sp, Family::UpperPlain)).unwrap();
    let e = crate::hinges::extended_pair(&f.curve, &c, Family::UpperPlain).unwrap();
    let target = math::rem_pos(f.sp.alpha + math::FRAC_PI_2, math::TAU);
    assert!((normal_angle_at(&f.curve, e.right.s) - target).abs() < 1e-9);
}

#[test]
fn halving_tolerance_barely_moves_the_end() {
    let f = fixture();
    let a = &f.lset.ode[1];
    let b = integrate_with_tol(&f.curve, &f.sp, Family::UpperPlain, 0.5 * ODE_TOL).unwrap();
    assert!(dist(a.u_end, b.u_end) < 1e-6);
}

#[test]
fn loop_closes_with_axis_parallel_connectors() {
    let f = fixture();
    assert_eq!(f.lset.arcs.len(), 8);
    assert!(f.lset.closure_gap() < 1e-7);
    for k in [3, 7] {
        let p = &f.lset.arcs[k].points;
        assert_eq!(p.len(), 3);
        assert!(p[0].u2 == p[1].u2 && p[1].u1 == p[2].u1);
    }
    assert_eq!(f.lset.ring.first(), f.lset.ring.last());
}

/// Winding number of a closed polyline around a point.
fn winding(ring: &[UPoint], u: UPoint) -> i32 {
    let mut w = 0;
    for s in ring.windows(2) {
        let (a, b) = (s[0], s[1]);
        let cross = (b.u1 - a.u1) * (u.u2 - a.u2) - (u.u1 - a.u1) * (b.u2 - a.u2);
        if a.u2 <= u.u2 {
            if b.u2 > u.u2 && cross > 0.0 {
                w += 1;
            }
        } else if b.u2 <= u.u2 && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

#[test]
fn membership_matches_winding_number() {
    use rand::{Rng, SeedableRng};
    let f = fixture();
    let l = &f.lset;
    assert!(l.contains(l.corners.u4));
    assert!(!l.contains(UPoint::new(0.0, 0.0)));
    let n = (l.ring.len() - 1) as f64;
    let c = l.ring[..l.ring.len() - 1]
        .iter()
        .fold(UPoint::new(0.0, 0.0), |a, p| UPoint::new(a.u1 + p.u1 / n, a.u2 + p.u2 / n));
    assert!(l.contains(c));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut inside = 0;
    for _ in 0..10_000 {
        let u = UPoint::new(rng.random::<f64>() * f.sp.ubar1, rng.random::<f64>() * f.sp.ubar2);
        let w = winding(&l.ring, u);
        assert_eq!(l.contains(u), w != 0, "{u:?}");
        inside += (w != 0) as usize;
    }
    assert!(inside > 100);
}

#[test]
fn pair_set_examples() {
    let f = fixture();
    let c = f.sp.phi_inv(&f.curve, f.lset.corners.u3).unwrap();
    let mid = (c.p_pt + c.q_pt) * 0.5;
    let x = mid - c.m * 0.1;
    let y = mid + c.m * 0.1;
    assert!(c.side_value(x) < 0.0);
    assert!(f.lset.pair_in_t(&f.curve, x, y).unwrap());
    assert!(!f.lset.pair_in_t(&f.curve, y, x).unwrap());
    assert!(matches!(f.lset.pair_in_t(&f.curve, x, x), Err(LyapunovError::CoincidentPoints)));
}

#[test]
fn pair_set_is_antisymmetric() {
    use rand::{Rng, SeedableRng};
    let f = fixture();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut hits = 0;
    let mut draw = || loop {
        let v = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-1.5..2.0));
        if f.curve.contains(v) {
            return v;
        }
    };
    for _ in 0..500 {
        let (x, y) = (draw(), draw());
        if f.lset.pair_in_t(&f.curve, x, y).unwrap() {
            hits += 1;
            assert!(!f.lset.pair_in_t(&f.curve, y, x).unwrap());
        }
    }
    assert!(hits > 0);
}
