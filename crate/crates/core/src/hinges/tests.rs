use super::*;
use crate::domains;
use crate::math::{self, FRAC_PI_4};

const TABLE: [(&str, bool, f64, f64); 16] = [
    ("P1", false, -2.41, -1.00),
    ("P3", false, -2.005, -1.28),
    ("P4", false, -0.7, -1.41),
    ("P6", false, -0.027, -1.41),
    ("Q1", false, 0.55, 1.97),
    ("Q3", false, 1.13, 1.85),
    ("Q4", false, 2.13, 1.41),
    ("Q6", false, 2.50, 1.11),
    ("P1", true, 2.71, -0.6),
    ("P3", true, 2.09, -1.01),
    ("P4", true, 0.9, -1.35),
    ("P6", true, 0.4, -1.40),
    ("Q1", true, 0.11, 2.0),
    ("Q3", true, -0.81, 1.89),
    ("Q4", true, -1.83, 1.38),
    ("Q6", true, -2.12, 1.12),
];

fn example1_points() -> (crate::geometry::BoundaryCurve, SpecialPoints) {
    let c = domains::example1();
    let sp = compute_special_points(&c, FRAC_PI_4).unwrap();
    (c, sp)
}

fn lookup(sp: &SpecialPoints, name: &str, primed: bool) -> BoundaryPoint {
    let row = if primed { &sp.primed } else { &sp.plain };
    row.named().into_iter().find(|(n, _)| *n == name).unwrap().1
}

#[test]
fn example1_table() {
    let (_, sp) = example1_points();
    for (name, primed, x, y) in TABLE {
        let p = lookup(&sp, name, primed);
        let err = p.xy.dist(Vec2::new(x, y));
        assert!(err <= 0.015, "{name} primed={primed}: {:?} off by {err}", p.xy);
    }
}

#[test]
fn example1_closed_forms() {
    let (_, sp) = example1_points();
    let r2 = math::sqrt(2.0);
    assert!(sp.plain.p1.xy.dist(Vec2::new(-1.0 - r2, -1.0)) < 1e-8);
    assert!(sp.primed.q6.xy.dist(Vec2::new(-1.5 * r2, -1.0 + 1.5 * r2)) < 1e-8);
}

fn crossing(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> Vec2 {
    let d = a1 - a0;
    let e = b1 - b0;
    let t = (b0 - a0).cross(e) / d.cross(e);
    a0 + d * t
}

#[test]
fn example1_hinge_free_ends_cross_at_midpoints() {
    let (_, sp) = example1_points();
    let (pl, pr) = (&sp.plain, &sp.primed);
    let x = crossing(pl.p3.xy, pl.q3.xy, pr.p6.xy, pr.q6.xy);
    assert!(x.dist(pr.p6.xy.lerp(pr.q6.xy, 0.5)) < 0.02, "{x:?}");
    let x = crossing(pr.p4.xy, pr.q4.xy, pl.p1.xy, pl.q1.xy);
    assert!(x.dist(pl.p1.xy.lerp(pl.q1.xy, 0.5)) < 0.02, "{x:?}");
}

#[test]
fn example1_orderings() {
    let (c, sp) = example1_points();
    let u1 = |p: BoundaryPoint| sp.u1_of_s(p.s);
    let u2 = |p: BoundaryPoint| sp.u2_of_s(p.s);
    assert!(u1(sp.plain.p3) < u1(sp.plain.p4) && u1(sp.plain.p4) < u1(sp.plain.p6));
    assert!(u1(sp.primed.p6) < u1(sp.primed.p4) && u1(sp.primed.p4) < u1(sp.primed.p3));
    assert!(u1(sp.primed.p3) < sp.ubar1);
    assert!(u2(sp.plain.q1) < u2(sp.plain.q3) && u2(sp.plain.q3) < u2(sp.plain.q4));
    assert!(u2(sp.plain.q4) < sp.ubar2);
    assert!((sp.ubar1 + sp.ubar2) < c.total_length());
}

#[test]
fn chart_round_trip() {
    let (c, sp) = example1_points();
    for (a, b) in [(0.1, 0.2), (0.5, 0.5), (0.93, 0.07), (0.0, 1.0)] {
        let u = UPoint::new(a * sp.ubar1, b * sp.ubar2);
        let ch = sp.phi_inv(&c, u).unwrap();
        let v = sp.phi(&ch, 1e-9).unwrap();
        assert!((u.u1 - v.u1).abs() < 1e-9 && (u.u2 - v.u2).abs() < 1e-9);
    }
    assert!(sp.phi_inv(&c, UPoint::new(-0.1, 0.0)).is_err());
}

#[test]
fn family_chords_are_members() {
    let (c, sp) = example1_points();
    for fam in Family::ALL {
        for (a, b) in [(0.2, 0.3), (0.5, 0.5), (0.8, 0.9)] {
            let ch = sp.family_chord(&c, fam, a, b).unwrap();
            assert!(sp.in_family(&c, &ch, fam, 0.0), "{fam:?}");
            assert!(sp.admissible(&ch, 1e-9), "{fam:?}");
        }
    }
}

#[test]
fn disk_has_no_hinge_free_arc() {
    let c = domains::disk(1.0);
    assert!(matches!(compute_special_points(&c, FRAC_PI_4), Err(HingeError::EmptyHingeFreeArc)));
}

#[test]
fn extremal_points_on_family_chords() {
    use rand::{Rng, SeedableRng};
    let (c, sp) = example1_points();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for fam in Family::ALL {
        for _ in 0..25 {
            let ch = sp.family_chord(&c, fam, rng.random(), rng.random()).unwrap();
            let e = extremal_points(&c, &ch, fam).unwrap();
            assert_eq!(e.h_left.side, Side::Left);
            assert_eq!(e.h_right.side, Side::Right);
            // the two extremal points are mirror images up to the boundary
            assert!(ch.reflect(e.a_left).dist(e.a_right) < 1e-6 * c.diameter()
                || ch.reflect(e.a_right).dist(e.a_left) < 1e-6 * c.diameter());
        }
    }
}

#[test]
fn symmetric_lens_gives_tangential_pair() {
    let c = domains::lens(2.0, 1.0);
    let top = c.find_by_normal_angle(1.5 * crate::math::PI).unwrap();
    let ch = Chord::through(&c, crate::math::FRAC_PI_2, top.point).unwrap();
    let r = extremal_pair(&c, &ch, Family::LowerPlain);
    assert!(matches!(r, Err(HingeError::TangentialIntersection { .. })));
}
