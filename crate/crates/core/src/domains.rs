//! Ready-made domains: the two worked examples and analytic test shapes.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{BoundaryCurve, BoundaryPiece};
use crate::math::{self, FRAC_PI_2, PI, TAU};
use crate::vec2::Vec2;

/// Piece list of the first worked example, starting at `(3, 0)`.
pub fn example1_pieces() -> Vec<BoundaryPiece> {
    let r2 = math::sqrt(2.0);
    vec![
        BoundaryPiece::EllipseArc { center: Vec2::ZERO, semi_axes: [3.0, 2.0], from: 0.0, to: FRAC_PI_2 },
        BoundaryPiece::CircleArc {
            center: Vec2::new(0.0, -1.0),
            radius: 3.0,
            from: FRAC_PI_2,
            to: PI - math::atan(1.0 / (2.0 * r2)),
        },
        BoundaryPiece::CircleArc { center: Vec2::new(-r2, 0.0), radius: r2, from: PI, to: 1.5 * PI },
        BoundaryPiece::Segment { from: Vec2::new(-r2, -r2), to: Vec2::new(0.0, -r2) },
        BoundaryPiece::EllipseArc { center: Vec2::ZERO, semi_axes: [3.0, r2], from: 1.5 * PI, to: TAU },
    ]
}

pub fn example1() -> BoundaryCurve {
    BoundaryCurve::new(example1_pieces()).expect("example 1 is a valid curve")
}

/// Two circular arcs joined by their external tangent segments.
///
/// Unit circle at the origin and a circle of radius 1/2 at `(1.2, 0)`;
/// symmetric about the x-axis, diameter 2.7, width 2.
pub fn example2_pieces() -> Vec<BoundaryPiece> {
    two_circle_hull(1.0, 0.5, 1.2)
}

pub fn example2() -> BoundaryCurve {
    BoundaryCurve::new(example2_pieces()).expect("example 2 is a valid curve")
}

/// Convex hull of the circles `(0,0; r_big)` and `(d,0; r_small)`.
pub fn two_circle_hull(r_big: f64, r_small: f64, d: f64) -> Vec<BoundaryPiece> {
    let g = math::acos((r_big - r_small) / d);
    let c = Vec2::new(d, 0.0);
    let big = |a: f64| Vec2::from_angle(a) * r_big;
    let small = |a: f64| c + Vec2::from_angle(a) * r_small;
    vec![
        BoundaryPiece::CircleArc { center: c, radius: r_small, from: -g, to: g },
        BoundaryPiece::Segment { from: small(g), to: big(g) },
        BoundaryPiece::CircleArc { center: Vec2::ZERO, radius: r_big, from: g, to: TAU - g },
        BoundaryPiece::Segment { from: big(-g), to: small(-g) },
    ]
}

pub fn disk(radius: f64) -> BoundaryCurve {
    BoundaryCurve::new(vec![BoundaryPiece::CircleArc { center: Vec2::ZERO, radius, from: 0.0, to: TAU }])
        .expect("disk is a valid curve")
}

/// Closed convex polygon from counterclockwise vertices.
pub fn polygon_pieces(vertices: &[Vec2]) -> Vec<BoundaryPiece> {
    let n = vertices.len();
    (0..n)
        .map(|i| BoundaryPiece::Segment { from: vertices[i], to: vertices[(i + 1) % n] })
        .collect()
}

/// `[0, w] x [0, h]`.
pub fn rectangle(w: f64, h: f64) -> BoundaryCurve {
    BoundaryCurve::new(polygon_pieces(&[
        Vec2::new(0.0, 0.0),
        Vec2::new(w, 0.0),
        Vec2::new(w, h),
        Vec2::new(0.0, h),
    ]))
    .expect("rectangle is a valid curve")
}

pub fn unit_square() -> BoundaryCurve {
    rectangle(1.0, 1.0)
}

/// Intersection of the disks of radius `r` centred at `(+-c, 0)`.
pub fn lens(r: f64, c: f64) -> BoundaryCurve {
    let a = math::acos(c / r);
    BoundaryCurve::new(vec![
        BoundaryPiece::CircleArc { center: Vec2::new(-c, 0.0), radius: r, from: -a, to: a },
        BoundaryPiece::CircleArc { center: Vec2::new(c, 0.0), radius: r, from: PI - a, to: PI + a },
    ])
    .expect("lens is a valid curve")
}

/// Full ellipse `x^2/a^2 + y^2/b^2 = 1`.
pub fn ellipse(a: f64, b: f64) -> BoundaryCurve {
    BoundaryCurve::new(vec![BoundaryPiece::EllipseArc {
        center: Vec2::ZERO,
        semi_axes: [a, b],
        from: 0.0,
        to: TAU,
    }])
    .expect("ellipse is a valid curve")
}
