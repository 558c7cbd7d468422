//! The three-parameter hypergraph that no 3-coloring can avoid, its exact
//! realization by unit balls in space, and the embedding that turns
//! axis-parallel rectangles in the plane into hextants in four dimensions.
//!
//! Any hypergraph with a zero parameter is empty. Vertex indices follow the
//! recursion: the three children `(k-1,l,m)`, `(k,l-1,m)`, `(k,l,m-1)` in
//! that order, then the new vertex.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{format_rational, int, rat, Point2, Rational};

/// Vertices `0..n` and the three edge families; every edge is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursiveHypergraph {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub families: [Vec<Vec<usize>>; 3],
}

impl RecursiveHypergraph {
    fn empty(k: usize, l: usize, m: usize) -> Self {
        RecursiveHypergraph { k, l, m, n: 0, families: Default::default() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.families.iter().map(Vec::len).sum()
    }

    /// The required size of edges in family `i` (0-based).
    pub fn family_size(&self, i: usize) -> usize {
        [self.k, self.l, self.m][i]
    }

    /// `(family, index, edge)` over all three families in order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &[usize])> {
        self.families
            .iter()
            .enumerate()
            .flat_map(|(f, es)| es.iter().enumerate().map(move |(j, e)| (f, j, e.as_slice())))
    }

    fn shifted(&self, offset: usize) -> [Vec<Vec<usize>>; 3] {
        self.families
            .clone()
            .map(|es| es.into_iter().map(|e| e.into_iter().map(|v| v + offset).collect()).collect())
    }
}

/// `N(k,l,m)` without building anything; saturates instead of overflowing.
pub fn vertex_count(k: usize, l: usize, m: usize) -> u64 {
    fn go(k: usize, l: usize, m: usize, memo: &mut HashMap<(usize, usize, usize), u64>) -> u64 {
        if k == 0 || l == 0 || m == 0 {
            return 0;
        }
        if (k, l, m) == (1, 1, 1) {
            return 1;
        }
        if let Some(&v) = memo.get(&(k, l, m)) {
            return v;
        }
        let v = go(k - 1, l, m, memo)
            .saturating_add(go(k, l - 1, m, memo))
            .saturating_add(go(k, l, m - 1, memo))
            .saturating_add(1);
        memo.insert((k, l, m), v);
        v
    }
    go(k, l, m, &mut HashMap::new())
}

/// Largest hypergraph `build_h` agrees to construct.
pub const BUILD_GUARD: u64 = 1 << 20;

pub fn build_h(k: usize, l: usize, m: usize) -> Result<RecursiveHypergraph> {
    if k == 0 || l == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("parameters must be positive, got ({k},{l},{m})")));
    }
    let n = vertex_count(k, l, m);
    if n > BUILD_GUARD {
        return Err(Error::Guard(format!("H({k},{l},{m}) has {n} vertices, above the limit of {BUILD_GUARD}")));
    }
    let mut memo = HashMap::new();
    Ok(build_memo(k, l, m, &mut memo))
}

fn build_memo(
    k: usize,
    l: usize,
    m: usize,
    memo: &mut HashMap<(usize, usize, usize), RecursiveHypergraph>,
) -> RecursiveHypergraph {
    if k == 0 || l == 0 || m == 0 {
        return RecursiveHypergraph::empty(k, l, m);
    }
    if let Some(h) = memo.get(&(k, l, m)) {
        return h.clone();
    }
    let h = if (k, l, m) == (1, 1, 1) {
        RecursiveHypergraph { k, l, m, n: 1, families: [vec![vec![0]], vec![vec![0]], vec![vec![0]]] }
    } else {
        let kids = [build_memo(k - 1, l, m, memo), build_memo(k, l - 1, m, memo), build_memo(k, l, m - 1, memo)];
        let mut offset = 0;
        let mut moved = Vec::new();
        for kid in &kids {
            moved.push(kid.shifted(offset));
            offset += kid.n;
        }
        let p = offset;
        let params = [k, l, m];
        let mut families: [Vec<Vec<usize>>; 3] = Default::default();
        for (f, fam) in families.iter_mut().enumerate() {
            if params[f] == 1 {
                *fam = (0..=p).map(|v| vec![v]).collect();
                continue;
            }
            // the child whose parameter f dropped gets p added, the other
            // two are copied
            fam.extend(moved[f][f].iter().map(|e| {
                let mut e = e.clone();
                e.push(p);
                e
            }));
            for (c, kid) in moved.iter().enumerate() {
                if c != f {
                    fam.extend(kid[f].iter().cloned());
                }
            }
        }
        RecursiveHypergraph { k, l, m, n: p + 1, families }
    };
    memo.insert((k, l, m), h.clone());
    h
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unavoidability {
    /// Every 3-coloring has some family-`i` edge entirely in color `i`.
    Unavoidable,
    /// A coloring (colors 1, 2, 3) with no such edge.
    Avoidable(Vec<u32>),
}

pub const UNAVOIDABLE_GUARD: usize = 24;

/// Exhaustive search for a coloring that puts no family-`i` edge entirely in
/// color `i + 1`. Edges are checked as soon as their last vertex is colored.
pub fn check_unavoidable(h: &RecursiveHypergraph) -> Result<Unavoidability> {
    if h.n > UNAVOIDABLE_GUARD {
        return Err(Error::Guard(format!(
            "{} vertices exceed the exhaustive search limit of {UNAVOIDABLE_GUARD}",
            h.n
        )));
    }
    // closing[v]: (color, edge) pairs whose largest vertex is v
    let mut closing: Vec<Vec<(u32, &[usize])>> = vec![Vec::new(); h.n];
    for (f, _, e) in h.edges() {
        match e.iter().max() {
            Some(&v) => closing[v].push((f as u32 + 1, e)),
            // an empty edge is trivially monochromatic in every coloring
            None => return Ok(Unavoidability::Unavoidable),
        }
    }
    if h.n == 0 {
        return Ok(Unavoidability::Avoidable(Vec::new()));
    }
    let found = (1..=3u32).into_par_iter().find_map_any(|first| {
        let mut colors = vec![0u32; h.n];
        colors[0] = first;
        if !closes(&closing[0], &colors) && extend(1, &mut colors, &closing) {
            Some(colors)
        } else {
            None
        }
    });
    Ok(match found {
        Some(c) => Unavoidability::Avoidable(c),
        None => Unavoidability::Unavoidable,
    })
}

fn closes(edges: &[(u32, &[usize])], colors: &[u32]) -> bool {
    edges.iter().any(|(c, e)| e.iter().all(|&v| colors[v] == *c))
}

fn extend(v: usize, colors: &mut [u32], closing: &[Vec<(u32, &[usize])>]) -> bool {
    if v == colors.len() {
        return true;
    }
    for c in 1..=3 {
        colors[v] = c;
        if !closes(&closing[v], colors) && extend(v + 1, colors, closing) {
            return true;
        }
    }
    colors[v] = 0;
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point3 {
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Point3 {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        Point3 { x, y, z }
    }

    pub fn origin() -> Self {
        Point3::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn add(&self, o: &Point3) -> Point3 {
        Point3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }

    pub fn dist2(&self, o: &Point3) -> Rational {
        let (dx, dy, dz) = (&self.x - &o.x, &self.y - &o.y, &self.z - &o.z);
        &dx * &dx + &dy * &dy + &dz * &dz
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", format_rational(&self.x), format_rational(&self.y), format_rational(&self.z))
    }
}

/// A closed-or-open unit ball; incidences are only accepted strictly
/// inside or strictly outside, so the distinction never matters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball3 {
    pub center: Point3,
}

impl Ball3 {
    pub fn contains(&self, p: &Point3) -> bool {
        p.dist2(&self.center) < Rational::one()
    }
}

/// Points indexed like the hypergraph's vertices, balls like its families.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub epsilon: Rational,
    pub points: Vec<Point3>,
    pub balls: [Vec<Ball3>; 3],
}

/// Deepest recursion `k+l+m-3` the command line realizes. Coordinates at
/// depth `d` carry `ε^(5^d)`, so one more level costs minutes instead of
/// seconds.
pub const REALIZE_MAX_DEPTH: usize = 4;

/// The child scale: `ε⁵`.
pub fn child_epsilon(eps: &Rational) -> Rational {
    num_traits::pow(eps.clone(), 5)
}

/// Ball centres sit near `(0,-1,0)`, `(0,1,0)`, `(0,0,-1)`, pulled towards
/// the origin by `ε⁴`.
fn base_centers(eps: &Rational) -> [Point3; 3] {
    let d = num_traits::pow(eps.clone(), 4);
    let one = Rational::one();
    let z = Rational::zero;
    [
        Point3::new(z(), d.clone() - &one, z()),
        Point3::new(z(), &one - &d, z()),
        Point3::new(z(), z(), d - one),
    ]
}

fn shifts(eps: &Rational) -> [Point3; 3] {
    let e2 = eps * eps;
    let e3 = &e2 * eps;
    let x = int(2) * eps - rat(3, 2) * e3;
    let y = int(2) * &e2;
    let z = Rational::zero;
    [
        Point3::new(x.clone(), y.clone(), z()),
        Point3::new(-x, -y, z()),
        Point3::new(z(), z(), int(2) * e2),
    ]
}

pub fn realize_unit_balls(k: usize, l: usize, m: usize, eps: &Rational) -> Result<Realization> {
    if k == 0 || l == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("parameters must be positive, got ({k},{l},{m})")));
    }
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::InvalidArgument(format!("epsilon {} is not in (0, 1)", format_rational(eps))));
    }
    let (points, balls) = realize_rec(k, l, m, eps);
    Ok(Realization { epsilon: eps.clone(), points, balls })
}

type Placed = (Vec<Point3>, [Vec<Ball3>; 3]);

fn realize_rec(k: usize, l: usize, m: usize, eps: &Rational) -> Placed {
    if k == 0 || l == 0 || m == 0 {
        return (Vec::new(), Default::default());
    }
    if (k, l, m) == (1, 1, 1) {
        let balls = base_centers(eps).map(|center| vec![Ball3 { center }]);
        return (vec![Point3::origin()], balls);
    }
    let child = child_epsilon(eps);
    let shift = shifts(eps);
    let kids = [realize_rec(k - 1, l, m, &child), realize_rec(k, l - 1, m, &child), realize_rec(k, l, m - 1, &child)];
    let moved: Vec<Placed> = kids
        .into_iter()
        .zip(&shift)
        .map(|((pts, balls), s)| {
            let pts = pts.iter().map(|p| p.add(s)).collect();
            let balls = balls.map(|bs| bs.iter().map(|b| Ball3 { center: b.center.add(s) }).collect());
            (pts, balls)
        })
        .collect();
    let mut points: Vec<Point3> = moved.iter().flat_map(|(p, _)| p.iter().cloned()).collect();
    points.push(Point3::origin());
    let params = [k, l, m];
    let virtual_centers = base_centers(&child);
    let mut balls: [Vec<Ball3>; 3] = Default::default();
    for (f, fam) in balls.iter_mut().enumerate() {
        if params[f] == 1 {
            // singleton edges in vertex order; the new point's ball is where
            // the empty child's base ball would have been
            for (c, kid) in moved.iter().enumerate() {
                if c != f {
                    fam.extend(kid.1[f].iter().cloned());
                }
            }
            fam.push(Ball3 { center: virtual_centers[f].add(&shift[f]) });
        } else {
            fam.extend(moved[f].1[f].iter().cloned());
            for (c, kid) in moved.iter().enumerate() {
                if c != f {
                    fam.extend(kid.1[f].iter().cloned());
                }
            }
        }
    }
    (points, balls)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceViolation {
    pub vertex: usize,
    pub family: usize,
    pub edge: usize,
    pub expected_inside: bool,
    pub dist2: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationReport {
    pub pairs_checked: usize,
    /// Smallest `|dist² - 1|` over all point/ball pairs.
    pub min_margin: Option<Rational>,
    pub violations: Vec<IncidenceViolation>,
}

impl RealizationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.min_margin.as_ref().is_none_or(|m| m.is_positive())
    }
}

/// Every point must be strictly inside exactly the balls of its edges and
/// strictly outside all others.
pub fn verify_realization(r: &Realization, h: &RecursiveHypergraph) -> Result<RealizationReport> {
    if r.points.len() != h.n || (0..3).any(|f| r.balls[f].len() != h.families[f].len()) {
        return Err(Error::InvalidArgument("realization and hypergraph sizes differ".into()));
    }
    let one = Rational::one();
    let per_vertex: Vec<(Option<Rational>, Vec<IncidenceViolation>)> = (0..h.n)
        .into_par_iter()
        .map(|v| {
            let mut min: Option<Rational> = None;
            let mut bad = Vec::new();
            for (f, j, e) in h.edges() {
                let d2 = r.points[v].dist2(&r.balls[f][j].center);
                let margin = (&d2 - &one).abs();
                let inside = e.contains(&v);
                let ok = if inside { d2 < one } else { d2 > one };
                if !ok {
                    bad.push(IncidenceViolation { vertex: v, family: f, edge: j, expected_inside: inside, dist2: d2 });
                }
                if min.as_ref().is_none_or(|m| margin < *m) {
                    min = Some(margin);
                }
            }
            (min, bad)
        })
        .collect();
    let mut report = RealizationReport { pairs_checked: h.n * h.edge_count(), min_margin: None, violations: Vec::new() };
    for (m, bad) in per_vertex {
        if let Some(m) = m {
            if report.min_margin.as_ref().is_none_or(|cur| m < *cur) {
                report.min_margin = Some(m);
            }
        }
        report.violations.extend(bad);
    }
    Ok(report)
}

/// Realizes and verifies, halving `ε` after each failure, at most
/// `max_halvings` times.
pub fn realize_verified(
    h: &RecursiveHypergraph,
    eps: &Rational,
    max_halvings: usize,
) -> Result<(Realization, RealizationReport)> {
    let mut eps = eps.clone();
    let mut last = None;
    for _ in 0..=max_halvings {
        let r = realize_unit_balls(h.k, h.l, h.m, &eps)?;
        let report = verify_realization(&r, h)?;
        if report.passed() {
            return Ok((r, report));
        }
        last = Some(report.violations.len());
        eps /= int(2);
    }
    Err(Error::Precondition(format!(
        "realization still has {} bad incidences after {max_halvings} halvings",
        last.unwrap_or(0)
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point4 {
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
    pub w: Rational,
}

/// `{(x,y,z,w) : x ≥ x0, y ≥ y0, z ≥ z0, w ≥ w0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hextant {
    pub x0: Rational,
    pub y0: Rational,
    pub z0: Rational,
    pub w0: Rational,
}

impl Hextant {
    pub fn contains(&self, p: &Point4) -> bool {
        p.x >= self.x0 && p.y >= self.y0 && p.z >= self.z0 && p.w >= self.w0
    }

    /// The hextant meeting the embedded plane in `rect`.
    pub fn from_rect(rect: &Rect) -> Self {
        Hextant { x0: rect.u0.clone(), y0: -rect.u1.clone(), z0: rect.v0.clone(), w0: -rect.v1.clone() }
    }

    /// Its trace on the embedded plane, in planar coordinates.
    pub fn trace(&self) -> Rect {
        Rect { u0: self.x0.clone(), u1: -self.y0.clone(), v0: self.z0.clone(), v1: -self.w0.clone() }
    }
}

/// The closed rectangle `[u0, u1] × [v0, v1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub u0: Rational,
    pub u1: Rational,
    pub v0: Rational,
    pub v1: Rational,
}

impl Rect {
    pub fn contains(&self, p: &Point2) -> bool {
        self.u0 <= p.x && p.x <= self.u1 && self.v0 <= p.y && p.y <= self.v1
    }
}

/// `(u, v) ↦ (u, -u, v, -v)`, onto the plane `x + y = 0, z + w = 0`.
pub fn hextant_embed(points: &[Point2]) -> Vec<Point4> {
    points
        .iter()
        .map(|p| Point4 { x: p.x.clone(), y: -p.x.clone(), z: p.y.clone(), w: -p.y.clone() })
        .collect()
}

/// Whether the points in `rect` are exactly those whose images lie in `hx`.
/// The two must correspond (`hx` traces `rect`).
pub fn hextant_range_check(points: &[Point2], rect: &Rect, hx: &Hextant) -> Result<bool> {
    if hx.trace() != *rect {
        return Err(Error::InvalidArgument("hextant does not trace the rectangle".into()));
    }
    let image = hextant_embed(points);
    Ok(points.iter().zip(&image).all(|(p, q)| rect.contains(p) == hx.contains(q)))
}
