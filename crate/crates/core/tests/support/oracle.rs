//! Brute-force range sampler used to cross-check the range engine.
//!
//! It shares nothing with the engine beyond the exact membership predicate.
//! Candidate homothets come from every solvable triple of tangency
//! equations (plain Gaussian elimination). Around each candidate it probes
//! the parameter offsets `δ·(a, b, e)` for integers `a, b, e` in
//! `[-radius, radius]`, and adds a coarse grid over a box around the points
//! plus a tiny homothet centred at each point. Any probe with no point on
//! its boundary contributes its interior.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use polycolor::geometry::{convex_distance, point_in_homothet, ConvexPolygon, Homothet, Point2, Rational};
use rayon::prelude::*;

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn gauss3(mut m: [[Rational; 4]; 3]) -> Option<[Rational; 3]> {
    for col in 0..3 {
        let pivot = (col..3).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        for r in 0..3 {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                let pivot_row = m[col].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| &m[i][3] / &m[i][i]))
}

fn probe(d: &ConvexPolygon, pts: &[Point2], h: &Homothet) -> Option<Vec<usize>> {
    if !h.scale.is_positive() {
        return None;
    }
    let mut inside = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let open = point_in_homothet(d, h, p, false);
        if open {
            inside.push(i);
        } else if point_in_homothet(d, h, p, true) {
            return None;
        }
    }
    (!inside.is_empty()).then_some(inside)
}

/// Candidate homothets: three tangency equations, positive scale, and every
/// point named in the triple on the closed homothet.
pub fn candidates(d: &ConvexPolygon, pts: &[Point2]) -> Vec<Homothet> {
    let sides = d.sides();
    let planes: Vec<(usize, usize)> = (0..pts.len()).flat_map(|p| (0..sides.len()).map(move |j| (p, j))).collect();
    let mut triples = Vec::new();
    for a in 0..planes.len() {
        for b in a + 1..planes.len() {
            for c in b + 1..planes.len() {
                triples.push([planes[a], planes[b], planes[c]]);
            }
        }
    }
    let found: BTreeSet<(Rational, Rational, Rational)> = triples
        .par_iter()
        .filter_map(|tri| {
            // n·c + s·b = n·p
            let rows = tri.map(|(p, j)| {
                let s = &sides[j];
                [s.normal.x.clone(), s.normal.y.clone(), s.offset.clone(), s.normal.dot(&pts[p])]
            });
            let x = gauss3(rows)?;
            let h = Homothet::new(Point2::new(x[0].clone(), x[1].clone()), x[2].clone());
            if !h.scale.is_positive() {
                return None;
            }
            tri.iter()
                .all(|&(p, _)| point_in_homothet(d, &h, &pts[p], true))
                .then(|| (x[0].clone(), x[1].clone(), x[2].clone()))
        })
        .collect();
    found
        .into_iter()
        .map(|(x, y, s)| Homothet::new(Point2::new(x, y), s))
        .collect()
}

/// Step size for probes around `h`: each slack changes by at most
/// `radius·max_j(|n_x|+|n_y|+b_j)·δ`, kept below half the smallest nonzero
/// slack.
fn delta(d: &ConvexPolygon, pts: &[Point2], h: &Homothet, radius: i64) -> Rational {
    let mut min: Option<Rational> = None;
    for p in pts {
        for s in d.sides() {
            let slack = (s.normal.dot(&p.sub(&h.center)) - &h.scale * &s.offset).abs();
            if !slack.is_zero() && min.as_ref().is_none_or(|m| slack < *m) {
                min = Some(slack);
            }
        }
    }
    let grad = d
        .sides()
        .iter()
        .map(|s| s.normal.x.abs() + s.normal.y.abs() + &s.offset)
        .max()
        .expect("sides");
    let base = min.unwrap_or_else(|| h.scale.clone()).min(h.scale.clone());
    base / (q(2 * radius) * grad)
}

pub fn sampled_ranges(d: &ConvexPolygon, pts: &[Point2], radius: i64, grid: i64) -> BTreeSet<Vec<usize>> {
    let mut offsets = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            for e in -radius..=radius {
                if (a, b, e) != (0, 0, 0) {
                    offsets.push((q(a), q(b), q(e)));
                }
            }
        }
    }
    let mut out: BTreeSet<Vec<usize>> = candidates(d, pts)
        .par_iter()
        .flat_map_iter(|h| {
            let dl = delta(d, pts, h, radius);
            offsets
                .iter()
                .filter_map(|(a, b, e)| {
                    let c = Point2::new(&h.center.x + a * &dl, &h.center.y + b * &dl);
                    probe(d, pts, &Homothet::new(c, &h.scale + e * &dl))
                })
                .collect::<Vec<_>>()
        })
        .collect();

    for (i, p) in pts.iter().enumerate() {
        let near = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| convex_distance(d, p, o))
            .min()
            .unwrap_or_else(Rational::one);
        if let Some(r) = probe(d, pts, &Homothet::new(p.clone(), near / q(3))) {
            out.insert(r);
        }
    }

    if grid > 0 && !pts.is_empty() {
        let xs = pts.iter().map(|p| p.x.clone());
        let ys = pts.iter().map(|p| p.y.clone());
        let (x0, x1) = (xs.clone().min().unwrap(), xs.max().unwrap());
        let (y0, y1) = (ys.clone().min().unwrap(), ys.max().unwrap());
        let span = (&x1 - &x0).max(&y1 - &y0) + q(1);
        let cells: Vec<(i64, i64, i64)> = (0..=grid)
            .flat_map(|i| (0..=grid).flat_map(move |j| (1..=grid).map(move |k| (i, j, k))))
            .collect();
        let extra: BTreeSet<Vec<usize>> = cells
            .par_iter()
            .filter_map(|&(i, j, k)| {
                // centres over the box padded by one span, odd offsets to
                // dodge the integer lattice
                let g = q(grid);
                let cx = &x0 - &span + q(3) * &span * q(i) / &g + Rational::new(1.into(), 7919.into());
                let cy = &y0 - &span + q(3) * &span * q(j) / &g + Rational::new(1.into(), 7907.into());
                let s = &span * q(k) / &g;
                probe(d, pts, &Homothet::new(Point2::new(cx, cy), s))
            })
            .collect();
        out.extend(extra);
    }
    out
}
