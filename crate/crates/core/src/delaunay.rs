//! The generalized Delaunay graph: `{u, v}` is an edge iff some homothet
//! contains exactly `u` and `v`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Homothet, Point2, PointSet, Rational};
use crate::mask::PointMask;
use crate::planar::RotationSystem;
use crate::ranges::{IntFrame, RangeSpace};

/// Straight-line plane graph with a rotation system and its faces.
#[derive(Clone, Debug)]
pub struct PlaneGraph {
    positions: Vec<Point2>,
    rotation: RotationSystem,
    faces: Vec<Vec<usize>>,
    outer: Option<usize>,
}

/// Counterclockwise angular order of direction vectors, starting from the
/// positive x axis.
fn angle_cmp(a: &Point2, b: &Point2) -> Ordering {
    let half = |p: &Point2| {
        if p.y.is_positive() || (p.y.is_zero() && p.x.is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| Rational::zero().cmp(&a.cross(b)))
}

fn signed_area2(pos: &[Point2], face: &[usize]) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..face.len() {
        acc += pos[face[i]].cross(&pos[face[(i + 1) % face.len()]]);
    }
    acc
}

impl PlaneGraph {
    /// Embeds the edge list using the point coordinates. Rotations are
    /// sorted by exact angle; the outer face is the one of least signed area
    /// (the only clockwise or degenerate walk in a connected drawing).
    pub fn from_edges(positions: Vec<Point2>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = positions.len();
        let mut rot = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidArgument(format!("bad edge ({u}, {v})")));
            }
            rot[u].push(v);
            rot[v].push(u);
        }
        for (u, r) in rot.iter_mut().enumerate() {
            r.sort_by(|&a, &b| angle_cmp(&positions[a].sub(&positions[u]), &positions[b].sub(&positions[u])));
        }
        let rotation = RotationSystem::new(rot)?;
        let faces: Vec<Vec<usize>> = rotation
            .faces()
            .into_iter()
            .map(|mut f| {
                let i = (0..f.len()).min_by_key(|&i| f[i]).expect("nonempty face");
                f.rotate_left(i);
                f
            })
            .collect();
        let outer = (0..faces.len()).min_by(|&a, &b| {
            signed_area2(&positions, &faces[a])
                .cmp(&signed_area2(&positions, &faces[b]))
                .then_with(|| faces[a].cmp(&faces[b]))
        });
        Ok(PlaneGraph { positions, rotation, faces, outer })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn rotation(&self) -> &RotationSystem {
        &self.rotation
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.rotation.edges()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn outer_face(&self) -> Option<usize> {
        self.outer
    }

    pub fn inner_faces(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.faces.iter().enumerate().filter(move |(i, _)| Some(*i) != self.outer).map(|(_, f)| f)
    }
}

pub fn build_dt(d: &ConvexPolygon, set: &PointSet) -> Result<PlaneGraph> {
    let space = RangeSpace::build(d, set)?;
    build_dt_from_ranges(set, &space)
}

/// Same as [`build_dt`] but reuses an already enumerated range space.
pub fn build_dt_from_ranges(set: &PointSet, space: &RangeSpace) -> Result<PlaneGraph> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let edges: Vec<(usize, usize)> = space
        .masks()
        .iter()
        .filter(|m| m.count() == 2)
        .map(|m| {
            let v = m.to_vec();
            (v[0], v[1])
        })
        .collect();
    let g = PlaneGraph::from_edges(set.points().to_vec(), &edges)?;
    if let Some((a, b)) = find_crossing(g.positions(), &g.edges()) {
        return Err(Error::Internal(format!("Delaunay edges {a:?} and {b:?} cross")));
    }
    Ok(g)
}

fn orient(a: &Point2, b: &Point2, c: &Point2) -> Ordering {
    b.sub(a).cross(&c.sub(a)).cmp(&Rational::zero())
}

/// `c` lies on the closed segment `ab`, given that the three are collinear.
fn within(a: &Point2, b: &Point2, c: &Point2) -> bool {
    a.x.clone().min(b.x.clone()) <= c.x
        && c.x <= a.x.clone().max(b.x.clone())
        && a.y.clone().min(b.y.clone()) <= c.y
        && c.y <= a.y.clone().max(b.y.clone())
}

/// Closed segments `ab` and `cd` share a point.
fn segments_meet(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal
        && o3 != Ordering::Equal && o4 != Ordering::Equal
    {
        return true;
    }
    (o1 == Ordering::Equal && within(a, b, c))
        || (o2 == Ordering::Equal && within(a, b, d))
        || (o3 == Ordering::Equal && within(c, d, a))
        || (o4 == Ordering::Equal && within(c, d, b))
}

/// Two edges of the straight-line drawing that meet anywhere other than a
/// shared endpoint, or an edge passing through a vertex.
pub fn find_crossing(pos: &[Point2], edges: &[(usize, usize)]) -> Option<((usize, usize), (usize, usize))> {
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            let shared = [a, b].iter().filter(|x| **x == c || **x == d).count();
            let hit = match shared {
                0 => segments_meet(&pos[a], &pos[b], &pos[c], &pos[d]),
                // sharing one endpoint: overlap iff collinear and pointing the same way
                1 => {
                    let s = if a == c || a == d { a } else { b };
                    let x = if s == a { b } else { a };
                    let y = if s == c { d } else { c };
                    orient(&pos[s], &pos[x], &pos[y]) == Ordering::Equal
                        && pos[x].sub(&pos[s]).dot(&pos[y].sub(&pos[s])).is_positive()
                }
                _ => false,
            };
            if hit {
                return Some(((a, b), (c, d)));
            }
        }
    }
    for &(a, b) in edges {
        for v in 0..pos.len() {
            if v != a && v != b && orient(&pos[a], &pos[b], &pos[v]) == Ordering::Equal && within(&pos[a], &pos[b], &pos[v]) {
                return Some(((a, b), (v, v)));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum DtViolation {
    Crossing { first: (usize, usize), second: (usize, usize) },
    Disconnected { components: usize },
    NonTriangularFace { face: Vec<usize> },
    DisconnectedRange { range: Vec<usize> },
    /// An edge cuts the witness of `range` with range points on both sides.
    SplitRange { range: Vec<usize>, edge: (usize, usize), witness: Homothet },
    EdgeMismatch { edge: (usize, usize) },
}

impl fmt::Display for DtViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtViolation::Crossing { first, second } => write!(f, "edges {first:?} and {second:?} cross"),
            DtViolation::Disconnected { components } => write!(f, "graph has {components} components"),
            DtViolation::NonTriangularFace { face } => write!(f, "inner face {face:?} is not a triangle"),
            DtViolation::DisconnectedRange { range } => write!(f, "range {range:?} induces a disconnected subgraph"),
            DtViolation::SplitRange { range, edge, witness } => {
                write!(f, "edge {edge:?} splits range {range:?} inside {witness}")
            }
            DtViolation::EdgeMismatch { edge } => write!(f, "edge {edge:?} disagrees with the range family"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct DtReport {
    pub ranges_checked: usize,
    pub violations: Vec<DtViolation>,
}

impl DtReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn induced_connected(g: &RotationSystem, m: &PointMask) -> bool {
    let Some(start) = m.iter().next() else { return true };
    let mut seen = PointMask::empty(g.len());
    seen.insert(start);
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if m.contains(w) && !seen.contains(w) {
                seen.insert(w);
                count += 1;
                stack.push(w);
            }
        }
    }
    count == m.count()
}

/// Whether the open segment `uv` meets the open homothet, given the side
/// values at both ends (negative on every side means inside).
fn segment_meets(au: &[BigInt], av: &[BigInt]) -> bool {
    // f_i(t) = (1-t)·a_i + t·b_i < 0 for all i on some t in (0, 1); track
    // the feasible interval as fractions with positive denominators
    if au.iter().zip(av).any(|(a, b)| !a.is_negative() && !b.is_negative()) {
        return false;
    }
    let (mut lo, mut hi) = ((BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::one()));
    for (a, b) in au.iter().zip(av) {
        let g = b - a;
        if g.is_zero() {
            continue; // a < 0 here, by the filter above
        }
        // f_i < 0  iff  t·g < -a
        let (num, den) = if g.is_positive() { (-a, g.clone()) } else { (a.clone(), -&g) };
        if g.is_positive() {
            if &num * &hi.1 < &hi.0 * &den {
                hi = (num, den);
            }
        } else if &num * &lo.1 > &lo.0 * &den {
            lo = (num, den);
        }
    }
    &lo.0 * &hi.1 < &hi.0 * &lo.1
}

/// Planarity, connectivity, triangular inner faces, connectivity of every
/// range, and the split property of edges crossing a range's witness.
pub fn check_dt_properties(g: &PlaneGraph, d: &ConvexPolygon, set: &PointSet) -> Result<DtReport> {
    let space = RangeSpace::build(d, set)?;
    check_dt_with_ranges(g, d, set, &space)
}

pub fn check_dt_with_ranges(g: &PlaneGraph, d: &ConvexPolygon, set: &PointSet, space: &RangeSpace) -> Result<DtReport> {
    let mut report = DtReport::default();
    let edges = g.edges();
    if let Some((first, second)) = find_crossing(g.positions(), &edges) {
        report.violations.push(DtViolation::Crossing { first, second });
    }
    let components = g.rotation().components().len();
    if components > 1 {
        report.violations.push(DtViolation::Disconnected { components });
    }
    if g.len() >= 3 {
        for f in g.inner_faces() {
            if f.len() != 3 {
                report.violations.push(DtViolation::NonTriangularFace { face: f.clone() });
            }
        }
    }
    for &(u, v) in &edges {
        if !space.is_edge(u, v) {
            report.violations.push(DtViolation::EdgeMismatch { edge: (u, v) });
        }
    }
    let points = set.points();
    let witnesses = space.open_witnesses(d, points)?;
    let frame = IntFrame::new(d, points);
    let n = frame.side_count();
    let per_range: Vec<Vec<DtViolation>> = (0..space.len())
        .into_par_iter()
        .map(|i| {
            let m = &space.masks()[i];
            let mut out = Vec::new();
            if !induced_connected(g.rotation(), m) {
                out.push(DtViolation::DisconnectedRange { range: m.to_vec() });
            }
            if m.count() < 2 {
                return out;
            }
            let w = &witnesses[i];
            let vals = frame.side_values(w);
            for &(u, v) in &edges {
                if m.contains(u) || m.contains(v) || !segment_meets(&vals[u * n..(u + 1) * n], &vals[v * n..(v + 1) * n]) {
                    continue;
                }
                let (mut left, mut right) = (false, false);
                for p in m.iter() {
                    match orient(&points[u], &points[v], &points[p]) {
                        Ordering::Greater => left = true,
                        Ordering::Less => right = true,
                        Ordering::Equal => {}
                    }
                }
                if left && right {
                    out.push(DtViolation::SplitRange { range: m.to_vec(), edge: (u, v), witness: w.clone() });
                }
            }
            out
        })
        .collect();
    for r in per_range {
        report.violations.extend(r);
    }
    report.ranges_checked = space.len();
    Ok(report)
}
