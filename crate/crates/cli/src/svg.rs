//! Minimal SVG 1.1 writer and the figures drawn by the commands.

use std::fmt::Write;

use mirror_core::hinges::{SpecialPoints, UPoint};
use mirror_core::spectral::{Regions, TriMesh};
use mirror_core::{BoundaryCurve, Vec2};

pub struct Svg {
    width: f64,
    height: f64,
    lo: Vec2,
    scale: f64,
    pad: f64,
    body: String,
}

impl Svg {
    /// Canvas `width` pixels wide showing the box `[lo, hi]`, y up.
    pub fn new(lo: Vec2, hi: Vec2, width: f64) -> Self {
        let pad = 30.0;
        let span = hi - lo;
        let scale = (width - 2.0 * pad) / span.x.max(1e-12);
        let height = span.y * scale + 2.0 * pad;
        Svg { width, height, lo, scale, pad, body: String::new() }
    }

    pub fn fitting(points: &[Vec2], width: f64) -> Self {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in points {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let m = (hi - lo) * 0.03;
        Svg::new(lo - m, hi + m, width)
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let q = (p - self.lo) * self.scale;
        (self.pad + q.x, self.height - self.pad - q.y)
    }

    fn points_attr(&self, pts: &[Vec2]) -> String {
        let mut s = String::new();
        for p in pts {
            let (x, y) = self.map(*p);
            let _ = write!(s, "{x:.2},{y:.2} ");
        }
        s.pop();
        s
    }

    pub fn polyline(&mut self, pts: &[Vec2], stroke: &str, width: f64, extra: &str) {
        let a = self.points_attr(pts);
        let _ = writeln!(
            self.body,
            r#"<polyline points="{a}" fill="none" stroke="{stroke}" stroke-width="{width}" {extra}/>"#
        );
    }

    pub fn polygon(&mut self, pts: &[Vec2], fill: &str, extra: &str) {
        let a = self.points_attr(pts);
        let _ = writeln!(self.body, r#"<polygon points="{a}" fill="{fill}" {extra}/>"#);
    }

    pub fn line(&mut self, a: Vec2, b: Vec2, stroke: &str, width: f64, extra: &str) {
        let ((x1, y1), (x2, y2)) = (self.map(a), self.map(b));
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}" {extra}/>"#
        );
    }

    pub fn dot(&mut self, p: Vec2, r: f64, fill: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn label(&mut self, p: Vec2, text: &str, size: f64) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-family="serif" font-size="{size}">{}</text>"#,
            x + 4.0,
            y - 4.0,
            escape(text)
        );
    }

    pub fn caption(&mut self, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="18" font-family="sans-serif" font-size="13">{}</text>"#,
            self.pad,
            escape(text)
        );
    }

    pub fn finish(self, comment: &str) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- {} -->\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            escape(comment).replace("--", "- -"),
            self.width,
            self.height,
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn u(p: UPoint) -> Vec2 {
    Vec2::new(p.u1, p.u2)
}

/// Boundary with the special points and the chords `[P_i, Q_i]`.
pub fn domain_figure(curve: &BoundaryCurve, sp: Option<&SpecialPoints>) -> Svg {
    let mut pts = curve.polyline(720);
    let mut svg = Svg::fitting(&pts, 640.0);
    pts.push(pts[0]);
    svg.polyline(&pts, "black", 1.5, "");
    if let Some(sp) = sp {
        for (row, color, mark) in [(&sp.plain, "#1f4e9c", ""), (&sp.primed, "#b22222", "'")] {
            for (p, q) in [(row.p1, row.q1), (row.p3, row.q3), (row.p4, row.q4), (row.p6, row.q6)] {
                svg.line(p.xy, q.xy, color, 0.8, r#"stroke-dasharray="4 3""#);
            }
            for (name, p) in row.named() {
                svg.dot(p.xy, 2.5, color);
                let mut s = name.to_string();
                s.insert_str(2.min(s.len()), mark);
                svg.label(p.xy, &s, 11.0);
            }
        }
    }
    svg
}

/// The loop in `(u1, u2)` coordinates with optional chart paths on top.
pub fn loop_figure(ring: &[UPoint], paths: &[Vec<UPoint>]) -> Svg {
    let mut all: Vec<Vec2> = ring.iter().map(|p| u(*p)).collect();
    for p in paths {
        all.extend(p.iter().map(|q| u(*q)));
    }
    let mut svg = Svg::fitting(&all, 560.0);
    let palette = ["#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"];
    for (i, p) in paths.iter().enumerate() {
        let pts: Vec<Vec2> = p.iter().map(|q| u(*q)).collect();
        svg.polyline(&pts, palette[i % palette.len()], 0.7, r#"stroke-opacity="0.8""#);
    }
    let pts: Vec<Vec2> = ring.iter().map(|p| u(*p)).collect();
    svg.polyline(&pts, "black", 1.6, "");
    svg
}

fn band_color(t: f64) -> String {
    // t in [-1, 1]: blue through white to red
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let s = 1.0 + t;
        (s, s, 1.0)
    } else {
        (1.0, 1.0 - t, 1.0 - t)
    };
    format!("#{:02x}{:02x}{:02x}", (255.0 * r) as u8, (255.0 * g) as u8, (255.0 * b) as u8)
}

/// Keeps the part of a closed polyline where the affine function `f` is
/// positive.
fn clip(poly: &[Vec2], f: impl Fn(Vec2) -> f64) -> Vec<Vec2> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (f(a), f(b));
        if fa > 0.0 {
            out.push(a);
        }
        if (fa > 0.0) != (fb > 0.0) {
            out.push(a.lerp(b, fa / (fa - fb)));
        }
    }
    out
}

pub struct EigenLayers<'a> {
    pub regions: Option<&'a Regions>,
    pub violating: &'a [u32],
    pub nodal: &'a [[Vec2; 2]],
    pub argmax: Vec2,
    pub argmin: Vec2,
}

/// Banded fill of a P1 function with its nodal line, the shaded left and
/// right regions and the triangles outside the gradient cone.
pub fn eigen_figure(curve: &BoundaryCurve, mesh: &TriMesh, psi: &[f64], layers: &EigenLayers) -> Svg {
    let boundary = curve.polyline(720);
    let mut svg = Svg::fitting(&boundary, 720.0);
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let bands = 10.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let mean = tri.iter().map(|&i| psi[i as usize]).sum::<f64>() / (3.0 * scale);
        let level = ((mean * bands).floor() + 0.5) / bands;
        let c = band_color(level);
        svg.polygon(&mesh.corners(t), &c, &format!(r#"stroke="{c}" stroke-width="0.3""#));
    }
    if let Some(r) = layers.regions {
        for side in [0, 1] {
            let region = clip(&boundary, |x| if side == 0 { r.left(x) } else { r.right(x) });
            if !region.is_empty() {
                svg.polygon(&region, "#555555", r##"fill-opacity="0.18" stroke="#555555" stroke-dasharray="5 3""##);
            }
        }
    }
    for &t in layers.violating {
        svg.polygon(&mesh.corners(t as usize), "none", r##"stroke="#00a000" stroke-width="1.2""##);
    }
    for s in layers.nodal {
        svg.line(s[0], s[1], "black", 1.4, "");
    }
    let mut closed = boundary.clone();
    closed.push(boundary[0]);
    svg.polyline(&closed, "black", 1.5, "");
    svg.dot(layers.argmax, 4.0, "#8b0000");
    svg.dot(layers.argmin, 4.0, "#00008b");
    svg
}
