use super::*;
use crate::domains;
use crate::math::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
    a.dist(b) <= tol
}

/// Ellipse quarter length by repeated Simpson doubling until two estimates
/// differ by less than 1e-10.
fn ellipse_quarter_oracle(a: f64, b: f64) -> f64 {
    let f = |t: f64| math::sqrt(a * a * math::sin(t) * math::sin(t) + b * b * math::cos(t) * math::cos(t));
    let mut n = 8;
    let mut prev = f64::NAN;
    loop {
        let h = FRAC_PI_2 / n as f64;
        let mut s = f(0.0) + f(FRAC_PI_2);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(h * i as f64);
        }
        let est = s * h / 3.0;
        if (est - prev).abs() < 1e-10 {
            return est;
        }
        prev = est;
        n *= 2;
    }
}

#[test]
fn example1_total_length_matches_quadrature_oracle() {
    let c = domains::example1();
    let r2 = math::sqrt(2.0);
    let circle_big = 3.0 * (PI - math::atan(1.0 / (2.0 * r2)) - FRAC_PI_2);
    let expected = ellipse_quarter_oracle(3.0, 2.0)
        + circle_big
        + r2 * FRAC_PI_2
        + r2
        + ellipse_quarter_oracle(3.0, r2);
    assert!((c.total_length() - expected).abs() < 1e-9, "{} vs {}", c.total_length(), expected);
}

#[test]
fn unit_circle_basics() {
    let c = domains::disk(1.0);
    assert!((c.total_length() - TAU).abs() < 1e-12);
    assert!(close(c.point_at(PI), Vec2::new(-1.0, 0.0), 1e-12));
    assert!(close(c.normal_at(PI).unwrap(), Vec2::new(1.0, 0.0), 1e-12));
    for i in 0..10 {
        let s = 0.3 + 0.6 * i as f64;
        assert!((c.curvature_at(s).unwrap() - 1.0).abs() < 1e-12);
    }
    let m = c.find_by_normal_angle(0.0).unwrap();
    assert!(close(m.point, Vec2::new(-1.0, 0.0), 1e-10));
}

#[test]
fn open_curve_is_rejected() {
    let pieces = alloc::vec![
        BoundaryPiece::Segment { from: Vec2::new(0.0, 0.0), to: Vec2::new(1.0, 0.0) },
        BoundaryPiece::Segment { from: Vec2::new(2.0, 0.0), to: Vec2::new(0.0, 1.0) },
    ];
    assert!(matches!(BoundaryCurve::new(pieces), Err(GeometryError::NotClosed { .. })));
}

#[test]
fn clockwise_polygon_is_not_convex() {
    let mut v = alloc::vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0)
    ];
    v.reverse();
    let r = BoundaryCurve::new(domains::polygon_pieces(&v));
    assert!(matches!(r, Err(GeometryError::NotConvex { .. })), "{r:?}");
}

#[test]
fn reentrant_polygon_is_not_convex() {
    let v = [
        Vec2::new(0.0, 0.0),
        Vec2::new(2.0, 0.0),
        Vec2::new(1.0, 0.5),
        Vec2::new(2.0, 2.0),
        Vec2::new(0.0, 2.0),
    ];
    assert!(matches!(BoundaryCurve::new(domains::polygon_pieces(&v)), Err(GeometryError::NotConvex { .. })));
}

#[test]
fn example1_segment_start_and_corner() {
    let c = domains::example1();
    let r2 = math::sqrt(2.0);
    let s6 = c.cumulative_lengths()[3];
    assert!(close(c.point_at(s6), Vec2::new(-r2, -r2), 1e-12));
    assert!(close(c.normal_at(s6).unwrap(), Vec2::new(0.0, 1.0), 1e-12));
    // the only corner is at (-2 sqrt 2, 0)
    let corners = c.corners();
    assert_eq!(corners.len(), 1);
    assert!(close(c.point_at(corners[0]), Vec2::new(-2.0 * r2, 0.0), 1e-12));
    assert!(matches!(c.normal_at(corners[0]), Err(GeometryError::JointPoint { .. })));
    assert!(matches!(c.curvature_at(s6), Err(GeometryError::JointCurvature { .. })));
}

#[test]
fn example1_normal_angle_lookups() {
    let c = domains::example1();
    let r2 = math::sqrt(2.0);
    let p1 = c.find_by_normal_angle(FRAC_PI_4).unwrap();
    assert!(close(p1.point, Vec2::new(-1.0 - r2, -1.0), 1e-9));
    let q6 = c.find_by_normal_angle(5.0 * FRAC_PI_4).unwrap();
    let s13 = math::sqrt(13.0);
    assert!(close(q6.point, Vec2::new(9.0 / s13, 4.0 / s13), 1e-9));
    // horizontal segment: flat match
    assert!(matches!(c.find_by_normal_angle(FRAC_PI_2), Err(GeometryError::FlatMatch { .. })));
    // inside the corner's normal cone
    let corner = c.find_by_normal_angle(0.5 * PI + 0.5 * (PI - math::atan(1.0 / (2.0 * r2))) - 0.6);
    let _ = corner;
}

#[test]
fn normal_is_rotated_tangent_and_lookup_inverts() {
    let c = domains::example1();
    let n = 997;
    for i in 0..n {
        let s = c.total_length() * (i as f64 + 0.5) / n as f64;
        let t = c.tangent_at(s);
        let nn = c.normal_one_sided(s);
        assert!(close(nn, t.perp(), 1e-10));
        if c.curvature_one_sided(s) > 1e-6 {
            let m = c.find_by_normal_angle(nn.angle()).unwrap();
            let ds = c.forward(m.s, s).min(c.forward(s, m.s));
            assert!(ds < 1e-8, "s={s} got {}", m.s);
        }
    }
}

#[test]
fn line_intersections() {
    let d = domains::disk(1.0);
    let h = d.line_boundary_intersections(&LineRepr::new(FRAC_PI_2, Vec2::ZERO)).unwrap();
    assert!(close(h.p, Vec2::new(0.0, -1.0), 1e-12) && close(h.q, Vec2::new(0.0, 1.0), 1e-12));
    let miss = d.line_boundary_intersections(&LineRepr::new(FRAC_PI_2, Vec2::new(2.0, 0.0)));
    assert_eq!(miss, Err(GeometryError::NoIntersection));
    let touch = d.line_boundary_intersections(&LineRepr::new(FRAC_PI_2, Vec2::new(1.0, 0.0)));
    assert!(matches!(touch, Err(GeometryError::TangentLine { .. })));
    // horizontal line ordered left to right
    let h = d.line_boundary_intersections(&LineRepr::new(0.0, Vec2::new(0.0, 0.5))).unwrap();
    assert!(h.q.x > h.p.x);

    let c = domains::example1();
    let r2 = math::sqrt(2.0);
    let p1 = Vec2::new(-1.0 - r2, -1.0);
    let h = c.line_boundary_intersections(&LineRepr::new(FRAC_PI_4, p1)).unwrap();
    // substitute x = p1.x + l, y = p1.y + l into x^2/9 + y^2/4 = 1
    let (qa, qb, qc) = (1.0 / 9.0 + 0.25, 2.0 * p1.x / 9.0 + 2.0 * p1.y / 4.0, p1.x * p1.x / 9.0 + p1.y * p1.y / 4.0 - 1.0);
    let l = (-qb + math::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
    let q1 = p1 + Vec2::new(l, l);
    assert!(close(h.q, q1, 1e-9), "{:?} vs {:?}", h.q, q1);
    assert!(close(h.p, p1, 1e-9));
    assert!((h.q.x - 0.55).abs() < 0.01 && (h.q.y - 1.97).abs() < 0.01);
}

#[test]
fn reflection_examples() {
    let l = LineRepr::new(FRAC_PI_2, Vec2::ZERO);
    assert!(close(reflect_point(Vec2::new(1.0, 0.0), &l), Vec2::new(-1.0, 0.0), 1e-15));
    let a = Vec2::new(0.0, 3.3);
    assert!(close(reflect_point(a, &l), a, 1e-15));
}

#[test]
fn inside_classification() {
    let d = domains::disk(1.0);
    assert_eq!(d.locate_point(Vec2::ZERO), Location::Inside);
    assert_eq!(d.locate_point(Vec2::new(2.0, 0.0)), Location::Outside);
    assert_eq!(d.locate_point(Vec2::new(1.0, 0.0)), Location::Boundary);
    let c = domains::example1();
    assert_eq!(c.locate_point(Vec2::ZERO), Location::Inside);
    for i in 0..200 {
        let s = c.total_length() * i as f64 / 200.0;
        let p = c.point_at(s);
        assert_eq!(c.locate_point(p), Location::Boundary, "s={s}");
        let n = c.normal_one_sided(s);
        assert_eq!(c.locate_point(p + n * 1e-4), Location::Inside);
        assert_eq!(c.locate_point(p - n * 1e-4), Location::Outside);
    }
}

#[test]
fn nearest_point_projects_onto_boundary() {
    let c = domains::example1();
    for i in 0..300 {
        let s = c.total_length() * (i as f64 + 0.37) / 300.0;
        let p = c.point_at(s);
        let n = c.normal_one_sided(s);
        let x = p - n * 0.05;
        let f = c.nearest_point(x);
        if c.curvature_one_sided(s) < 1.0 / 0.05 {
            assert!(f.dist <= 0.05 + 1e-12);
            if c.corners().iter().all(|&k| c.point_at(k).dist(p) > 0.2) {
                assert!(close(f.point, p, 1e-7), "s={s} {:?} {:?}", f.point, p);
            }
        }
    }
}

#[test]
fn fillet_square_length() {
    let sq = domains::unit_square();
    let r = fillet_smooth(&sq, 0.1).unwrap();
    let expected = 4.0 - 8.0 * 0.1 + TAU * 0.1;
    assert!((r.total_length() - expected).abs() < 1e-10);
    assert!(r.corners().is_empty());
    assert!(matches!(fillet_smooth(&sq, 0.6), Err(GeometryError::RhoTooLarge { .. })));
}

#[test]
fn fillet_on_smooth_curve_is_identity() {
    let e = domains::ellipse(2.0, 1.0);
    let r = fillet_smooth(&e, 0.1).unwrap();
    assert_eq!(r.piece_count(), 1);
    assert!((r.total_length() - e.total_length()).abs() < 1e-14);
}

#[test]
fn fillet_example1_hausdorff_and_containment() {
    let c = domains::example1();
    let f = fillet_smooth(&c, 0.05).unwrap();
    assert!(f.corners().is_empty());
    let a = c.polyline(4000);
    let b = f.polyline(4000);
    let mut h: f64 = 0.0;
    for p in &a {
        h = h.max(f.nearest_point(*p).dist);
    }
    for p in &b {
        h = h.max(c.nearest_point(*p).dist);
        assert!(c.in_closure(*p, 1e-9));
    }
    assert!(h <= 0.05, "hausdorff {h}");
    assert!(h > 0.0);
}

#[test]
fn area_of_rectangle_and_disk() {
    assert!((domains::rectangle(1.0, 2.0).area() - 2.0).abs() < 1e-12);
    assert!((domains::disk(1.0).area() - PI).abs() < 1e-12);
}
