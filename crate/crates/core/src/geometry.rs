//! Exact rational geometry for homothets of a convex polygon.
//!
//! A body `D` is stored as a counterclockwise vertex list plus one
//! `(normal, offset)` pair per side, so that the open body is
//! `{p : n_i·p < b_i for all i}`. A homothet `c + sD` then contains `p`
//! iff `n_i·(p - c) < s·b_i` for every side, which is linear in `(c, s)`.
//! Nothing in this module rounds.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"num/den"`, a plain integer, or a finite decimal such as `"-0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidArgument(format!("malformed rational {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() {
            return Err(bad());
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mantissa: BigInt = format!("{digits}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2 { x: int(x), y: int(y) }
    }

    pub fn dot(&self, other: &Point2) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn cross(&self, other: &Point2) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn sub(&self, other: &Point2) -> Point2 {
        Point2::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn add(&self, other: &Point2) -> Point2 {
        Point2::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn scale(&self, k: &Rational) -> Point2 {
        Point2::new(&self.x * k, &self.y * k)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

/// One side of the body: `normal·p <= offset` on the closed body.
#[derive(Clone, Debug, PartialEq)]
pub struct Side {
    pub normal: Point2,
    pub offset: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    sides: Vec<Side>,
    shift: Point2,
}

impl ConvexPolygon {
    /// Builds the body from its vertices. Clockwise input is reversed; the
    /// polygon is translated so that its vertex centroid sits at the origin.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("need at least 3 vertices, got {n}")));
        }
        let mut vertices = vertices;
        let mut area2 = Rational::zero();
        for i in 0..n {
            area2 += vertices[i].cross(&vertices[(i + 1) % n]);
        }
        if area2.is_zero() {
            return Err(Error::InvalidPolygon("degenerate (zero area)".into()));
        }
        if area2.is_negative() {
            vertices.reverse();
        }
        let mut cx = Rational::zero();
        let mut cy = Rational::zero();
        for v in &vertices {
            cx += &v.x;
            cy += &v.y;
        }
        let count = int(n as i64);
        let shift = Point2::new(cx / &count, cy / &count);
        let vertices: Vec<Point2> = vertices.iter().map(|v| v.sub(&shift)).collect();

        let mut sides = Vec::with_capacity(n);
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            let e = b.sub(a);
            let normal = Point2::new(e.y.clone(), -e.x.clone());
            let offset = normal.dot(a);
            sides.push(Side { normal, offset });
        }
        for (i, side) in sides.iter().enumerate() {
            for (j, v) in vertices.iter().enumerate() {
                if j == i || j == (i + 1) % n {
                    continue;
                }
                if side.normal.dot(v) >= side.offset {
                    return Err(Error::InvalidPolygon(format!(
                        "not strictly convex: vertex {j} is not strictly inside side {i}"
                    )));
                }
            }
            if !side.offset.is_positive() {
                return Err(Error::InvalidPolygon("centroid is not interior".into()));
            }
        }
        Ok(ConvexPolygon { vertices, sides, shift })
    }

    /// Axis-parallel square with corners `(±1, ±1)`.
    pub fn square() -> Self {
        Self::from_int_vertices(&[(-1, -1), (1, -1), (1, 1), (-1, 1)])
    }

    /// The triangle `(-1,-1), (2,-1), (-1,2)`.
    pub fn triangle() -> Self {
        Self::from_int_vertices(&[(-1, -1), (2, -1), (-1, 2)])
    }

    pub fn from_int_vertices(vs: &[(i64, i64)]) -> Self {
        Self::new(vs.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect())
            .expect("hard-coded polygon is valid")
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn side_count(&self) -> usize {
        self.sides.len()
    }

    /// Translation subtracted from the input vertices during normalization.
    pub fn shift(&self) -> &Point2 {
        &self.shift
    }

    /// Vertices of the homothet `h`, in counterclockwise order.
    pub fn homothet_vertices(&self, h: &Homothet) -> Vec<Point2> {
        self.vertices.iter().map(|v| h.center.add(&v.scale(&h.scale))).collect()
    }
}

/// The homothet `center + scale·D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homothet {
    pub center: Point2,
    pub scale: Rational,
}

impl Homothet {
    pub fn new(center: Point2, scale: Rational) -> Self {
        Homothet { center, scale }
    }
}

impl fmt::Display for Homothet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·D", self.center, format_rational(&self.scale))
    }
}

pub fn point_in_homothet(d: &ConvexPolygon, h: &Homothet, p: &Point2, closed: bool) -> bool {
    let rel = p.sub(&h.center);
    d.sides.iter().all(|side| {
        let lhs = side.normal.dot(&rel);
        let rhs = &h.scale * &side.offset;
        if closed {
            lhs <= rhs
        } else {
            lhs < rhs
        }
    })
}

/// Smallest `s >= 0` with `p` in the closed homothet `c + sD`.
pub fn convex_distance(d: &ConvexPolygon, c: &Point2, p: &Point2) -> Rational {
    let rel = p.sub(c);
    d.sides
        .iter()
        .map(|side| side.normal.dot(&rel) / &side.offset)
        .fold(Rational::zero(), |acc, v| if v > acc { v } else { acc })
}

/// Why a point set is not in general position with respect to `D`.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Two points span a direction parallel to a side.
    ParallelPair { a: usize, b: usize, side: usize },
    /// Four or more points on the boundary of one homothet.
    CommonBoundary { points: Vec<usize>, homothet: Box<Homothet> },
    /// The same point listed twice.
    Duplicate { a: usize, b: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ParallelPair { a, b, side } => {
                write!(f, "points {a} and {b} lie on a line parallel to side {side}")
            }
            Violation::CommonBoundary { points, homothet } => {
                write!(f, "points {points:?} lie on the boundary of {homothet}")
            }
            Violation::Duplicate { a, b } => write!(f, "points {a} and {b} coincide"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneralPosition {
    Unchecked,
    Verified,
    Violated(Violation),
}

/// Distinct points together with the outcome of the last general-position check.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point2>,
    status: GeneralPosition,
}

impl PointSet {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        let mut sorted: Vec<(usize, &Point2)> = points.iter().enumerate().collect();
        sorted.sort_by(|a, b| a.1.cmp(b.1));
        for w in sorted.windows(2) {
            if w[0].1 == w[1].1 {
                let (a, b) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
                return Err(Error::GeneralPosition(Violation::Duplicate { a, b }));
            }
        }
        Ok(PointSet { points, status: GeneralPosition::Unchecked })
    }

    /// Builds the set and runs the general-position check against `d`.
    pub fn verified(d: &ConvexPolygon, points: Vec<Point2>) -> Result<Self> {
        let mut set = Self::new(points)?;
        match set.check(d) {
            GeneralPosition::Violated(v) => Err(Error::GeneralPosition(v.clone())),
            _ => Ok(set),
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn status(&self) -> &GeneralPosition {
        &self.status
    }

    pub fn is_verified(&self) -> bool {
        self.status == GeneralPosition::Verified
    }

    pub fn check(&mut self, d: &ConvexPolygon) -> &GeneralPosition {
        self.status = match general_position_check(d, &self.points) {
            Ok(()) => GeneralPosition::Verified,
            Err(v) => GeneralPosition::Violated(v),
        };
        &self.status
    }

    pub fn require_verified(&self) -> Result<()> {
        match &self.status {
            GeneralPosition::Verified => Ok(()),
            GeneralPosition::Unchecked => Err(Error::GeneralPositionUnverified),
            GeneralPosition::Violated(v) => Err(Error::GeneralPosition(v.clone())),
        }
    }

    /// Restriction to the given indices; a verified set stays verified.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            status: self.status.clone(),
        }
    }
}

pub fn parallel_to_side(d: &ConvexPolygon, a: &Point2, b: &Point2) -> Option<usize> {
    let dir = b.sub(a);
    d.sides.iter().position(|side| side.normal.dot(&dir).is_zero())
}

/// Checks both general-position conditions. The four-on-a-boundary test
/// solves every three-tangency system and counts boundary incidences.
pub fn general_position_check(d: &ConvexPolygon, points: &[Point2]) -> std::result::Result<(), Violation> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Violation::Duplicate { a: i, b: j });
            }
            if let Some(side) = parallel_to_side(d, &points[i], &points[j]) {
                return Err(Violation::ParallelPair { a: i, b: j, side });
            }
        }
    }
    if let Some((pts, h)) = crate::ranges::find_crowded_boundary(d, points) {
        return Err(Violation::CommonBoundary { points: pts, homothet: Box::new(h) });
    }
    Ok(())
}

/// Moves every point by an independent offset in `(-magnitude, magnitude)^2`.
/// Offsets have denominator `2^32` and come from a SplitMix64 stream seeded
/// with `seed`. The result is unchecked.
pub fn perturb(set: &PointSet, magnitude: &Rational, seed: u64) -> Result<PointSet> {
    if !magnitude.is_positive() {
        return Err(Error::InvalidArgument("perturbation magnitude must be positive".into()));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let two32 = BigInt::from(1u64 << 32);
    let mut offset = || {
        let u = BigInt::from(rng.next_u64() >> 32);
        // (2u + 1 - 2^32) / 2^32 lies strictly inside (-1, 1)
        let num = u * 2 + 1 - &two32;
        Rational::new(num, two32.clone()) * magnitude
    };
    let points = set
        .points
        .iter()
        .map(|p| Point2::new(&p.x + offset(), &p.y + offset()))
        .collect();
    PointSet::new(points)
}

/// For each side, the index of the unique point maximizing `n_i·p`.
pub fn extremal_points(d: &ConvexPolygon, points: &[Point2]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("extremal points of an empty set".into()));
    }
    let mut out = Vec::with_capacity(d.side_count());
    for (side_idx, side) in d.sides.iter().enumerate() {
        let mut best = 0;
        let mut best_val = side.normal.dot(&points[0]);
        let mut tie: Option<usize> = None;
        for (i, p) in points.iter().enumerate().skip(1) {
            let v = side.normal.dot(p);
            if v > best_val {
                best = i;
                best_val = v;
                tie = None;
            } else if v == best_val {
                tie = Some(i);
            }
        }
        if let Some(other) = tie {
            return Err(Error::GeneralPosition(Violation::ParallelPair {
                a: best.min(other),
                b: best.max(other),
                side: side_idx,
            }));
        }
        out.push(best);
    }
    Ok(out)
}
