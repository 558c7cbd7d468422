//! Deterministic SVG 1.1 drawings. Coordinates are rounded to three
//! decimals for display only.

use std::fmt::Write;

use num_traits::ToPrimitive;
use polycolor::geometry::{ConvexPolygon, Homothet, Point2, Rational};

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Scene<'a> {
    pub polygon: &'a ConvexPolygon,
    pub points: &'a [Point2],
    pub edges: &'a [(usize, usize)],
    pub colors: Option<&'a [u32]>,
    pub witness: Option<&'a Homothet>,
}

fn f(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

pub fn render(scene: &Scene) -> String {
    let witness: Vec<Point2> = scene.witness.map(|h| scene.polygon.homothet_vertices(h)).unwrap_or_default();
    let all: Vec<(f64, f64)> = scene.points.iter().chain(&witness).map(|p| (f(&p.x), f(&p.y))).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, 0.0f64, 1.0f64);
    if let Some(&(x, y)) = all.first() {
        (x0, x1, y0, y1) = (x, x, y, y);
        for &(x, y) in &all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let k = (CANVAS - 2.0 * MARGIN) / span;
    let tx = |x: f64| MARGIN + (x - x0) * k;
    // y grows upwards in the plane, downwards on the canvas
    let ty = |y: f64| CANVAS - MARGIN - (y - y0) * k;
    let at = |p: &Point2| (tx(f(&p.x)), ty(f(&p.y)));

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        "<!-- canvas {CANVAS}x{CANVAS}, margin {MARGIN}; u = {MARGIN} + (x - ({x0:.3}))*{k:.6}, \
         v = {} - (y - ({y0:.3}))*{k:.6} -->",
        CANVAS - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !witness.is_empty() {
        let pts: Vec<String> = witness
            .iter()
            .map(|p| {
                let (u, v) = at(p);
                format!("{u:.3},{v:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon class="witness" points="{}" fill="none" stroke="#555555" stroke-dasharray="6,4"/>"##,
            pts.join(" ")
        );
    }
    for &(a, b) in scene.edges {
        let (u1, v1) = at(&scene.points[a]);
        let (u2, v2) = at(&scene.points[b]);
        let _ = writeln!(
            s,
            r##"<line class="edge" x1="{u1:.3}" y1="{v1:.3}" x2="{u2:.3}" y2="{v2:.3}" stroke="#999999" stroke-width="1"/>"##
        );
    }
    for (i, p) in scene.points.iter().enumerate() {
        let (u, v) = at(p);
        let fill = match scene.colors.and_then(|c| c.get(i)) {
            Some(&c) if c >= 1 => PALETTE[(c as usize - 1) % PALETTE.len()],
            _ => "#000000",
        };
        let _ = writeln!(s, r#"<circle class="node" cx="{u:.3}" cy="{v:.3}" r="4" fill="{fill}"><title>{i}</title></circle>"#);
    }
    s.push_str("</svg>\n");
    s
}
