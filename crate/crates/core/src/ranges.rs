//! Enumeration of every subset `S ∩ D'` cut out by an open homothet `D'`.
//!
//! Work happens in the parameter space `(c_x, c_y, s)`. Point `p` lies on
//! side `j` of `c + sD` exactly on the plane `n_j·c + s·b_j = n_j·p`, and it
//! is inside the open homothet iff every such expression is strictly
//! positive. Each nonempty range with two or more points is attained by a
//! cell whose closure has a vertex where three independent tangency planes
//! meet, and every plane through that vertex belongs to a point lying on the
//! closed boundary. (Take the lexicographically smallest `(s, c_x, c_y)` in
//! the closure of the cell.) So the engine solves every triple of tangency
//! planes, keeps the solutions whose pinned points sit on the boundary, and
//! reads off the ranges of all cells around each such vertex.
//!
//! The inner loop runs on scaled integers: `i128` when the input magnitudes
//! provably fit, `BigInt` otherwise.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{convex_distance, ConvexPolygon, Homothet, Point2, PointSet, Rational};
use crate::mask::PointMask;

/// Point `point` touching side `side` of a homothet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangencyConstraint {
    pub point: usize,
    pub side: usize,
}

/// A homothet pinned by three independent tangency constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct PinnedCandidate {
    pub constraints: [TangencyConstraint; 3],
    pub homothet: Homothet,
}

/// Classification of a point set against one homothet.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeReport {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    pub witness: Homothet,
}

impl RangeReport {
    /// `interior ∪ B` for every subset `B` of the boundary points, skipping
    /// the empty set. Exact for witnesses pinned by exactly three planes.
    pub fn realizable_ranges(&self) -> Vec<Vec<usize>> {
        let b = self.boundary.len();
        let mut out = Vec::new();
        for bits in 0u32..(1 << b) {
            let mut set = self.interior.clone();
            for (k, &p) in self.boundary.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    set.push(p);
                }
            }
            if !set.is_empty() {
                set.sort_unstable();
                out.push(set);
            }
        }
        out
    }
}

pub fn realized_range(d: &ConvexPolygon, points: &[Point2], h: &Homothet) -> Result<RangeReport> {
    if h.scale <= Rational::zero() {
        return Err(Error::InvalidArgument("homothet scale must be positive".into()));
    }
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let rel = p.sub(&h.center);
        let mut worst = std::cmp::Ordering::Less;
        for side in d.sides() {
            let lhs = side.normal.dot(&rel);
            let rhs = &h.scale * &side.offset;
            worst = worst.max(lhs.cmp(&rhs));
            if worst == std::cmp::Ordering::Greater {
                break;
            }
        }
        match worst {
            std::cmp::Ordering::Less => interior.push(i),
            std::cmp::Ordering::Equal => boundary.push(i),
            std::cmp::Ordering::Greater => {}
        }
    }
    Ok(RangeReport { interior, boundary, witness: h.clone() })
}

// ---------------------------------------------------------------------------
// integer kernel

pub(crate) trait KInt:
    Integer + Signed + Clone + From<i64> + Hash + Send + Sync + Debug + 'static
{
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
}

impl KInt for i128 {
    fn from_big(v: &BigInt) -> Self {
        v.to_i128().expect("magnitude checked before choosing i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl KInt for BigInt {
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

type V3<I> = [I; 3];

fn cross<I: KInt>(a: &V3<I>, b: &V3<I>) -> V3<I> {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

fn dot<I: KInt>(a: &V3<I>, b: &V3<I>) -> I {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

fn is_zero3<I: KInt>(a: &V3<I>) -> bool {
    a.iter().all(|x| x.is_zero())
}

fn primitive<I: KInt>(a: V3<I>) -> V3<I> {
    let g = a[0].gcd(&a[1]).gcd(&a[2]);
    if g.is_zero() || g.is_one() {
        return a;
    }
    [a[0].clone() / g.clone(), a[1].clone() / g.clone(), a[2].clone() / g]
}

/// One representative direction per open cell of the central arrangement of
/// planes `{d : row·d = 0}`. The rows must span three dimensions. Each cell
/// is a pointed cone whose extreme rays are intersections of two planes, and
/// the sum of any three of its extreme rays lies strictly inside it.
pub(crate) fn cell_directions<I: KInt>(rows: &[V3<I>]) -> Vec<V3<I>> {
    let mut rays: Vec<V3<I>> = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let c = cross(&rows[a], &rows[b]);
            if is_zero3(&c) {
                continue;
            }
            let c = primitive(c);
            let neg = [-c[0].clone(), -c[1].clone(), -c[2].clone()];
            for r in [c, neg] {
                if !rays.contains(&r) {
                    rays.push(r);
                }
            }
        }
    }
    let mut seen: Vec<Vec<bool>> = Vec::new();
    let mut out = Vec::new();
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            for k in j + 1..rays.len() {
                let d = [
                    rays[i][0].clone() + rays[j][0].clone() + rays[k][0].clone(),
                    rays[i][1].clone() + rays[j][1].clone() + rays[k][1].clone(),
                    rays[i][2].clone() + rays[j][2].clone() + rays[k][2].clone(),
                ];
                let mut signs = Vec::with_capacity(rows.len());
                let mut ok = true;
                for r in rows {
                    let v = dot(r, &d);
                    if v.is_zero() {
                        ok = false;
                        break;
                    }
                    signs.push(v.is_positive());
                }
                if ok && !seen.contains(&signs) {
                    seen.push(signs);
                    out.push(d);
                }
            }
        }
    }
    out
}

/// A vertex of the parameter-space arrangement, `(X, Y, S) / det` with
/// `det > 0`, in scaled coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Vertex<I> {
    num: V3<I>,
    det: I,
}

enum PointClass {
    Inside,
    Boundary(Vec<u32>),
    Outside,
}

pub(crate) struct Kernel<I> {
    sides: Vec<V3<I>>,
    /// `n_j·p` for plane `p*n + j`.
    rhs: Vec<I>,
    n_sides: usize,
    n_points: usize,
    /// Points were multiplied by this before conversion to integers.
    scale: BigInt,
}

fn lcm_denoms<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

impl<I: KInt> Kernel<I> {
    fn new(d: &ConvexPolygon, points: &[Point2]) -> Self {
        let (sides, ints, scale) = integer_data(d, points);
        let n = sides.len();
        let sides: Vec<V3<I>> = sides
            .iter()
            .map(|s| [I::from_big(&s[0]), I::from_big(&s[1]), I::from_big(&s[2])])
            .collect();
        let pts: Vec<[I; 2]> = ints.iter().map(|p| [I::from_big(&p[0]), I::from_big(&p[1])]).collect();
        let mut rhs = Vec::with_capacity(pts.len() * n);
        for p in &pts {
            for s in &sides {
                rhs.push(s[0].clone() * p[0].clone() + s[1].clone() * p[1].clone());
            }
        }
        Kernel { sides, rhs, n_sides: n, n_points: pts.len(), scale }
    }

    fn plane_count(&self) -> usize {
        self.n_points * self.n_sides
    }

    fn row(&self, plane: usize) -> &V3<I> {
        &self.sides[plane % self.n_sides]
    }

    fn adjacent_sides(&self, a: usize, b: usize) -> bool {
        let n = self.n_sides;
        (a + 1) % n == b || (b + 1) % n == a
    }

    /// Sign of `n_j·(q - c) - s·b_j`, scaled by `det`.
    fn slack(&self, v: &Vertex<I>, q: usize, side: usize) -> I {
        self.rhs[q * self.n_sides + side].clone() * v.det.clone() - dot(&self.sides[side], &v.num)
    }

    fn classify(&self, v: &Vertex<I>, q: usize) -> PointClass {
        let mut tight = Vec::new();
        for j in 0..self.n_sides {
            let s = self.slack(v, q, j);
            if s.is_positive() {
                return PointClass::Outside;
            }
            if s.is_zero() {
                tight.push(j as u32);
            }
        }
        if tight.is_empty() {
            PointClass::Inside
        } else {
            PointClass::Boundary(tight)
        }
    }

    fn on_closed_boundary(&self, v: &Vertex<I>, q: usize) -> bool {
        (0..self.n_sides).all(|j| !self.slack(v, q, j).is_positive())
    }

    /// Solves the three tangency planes and keeps the solution when `s > 0`
    /// and every pinned point lies on the closed homothet.
    fn solve(&self, planes: [usize; 3], cab: &V3<I>) -> Option<Vertex<I>> {
        let [a, b, c] = planes;
        let (ra, rb, rc) = (self.row(a), self.row(b), self.row(c));
        let mut det = dot(rc, cab);
        if det.is_zero() {
            return None;
        }
        let cbc = cross(rb, rc);
        let cca = cross(rc, ra);
        let (ha, hb, hc) = (&self.rhs[a], &self.rhs[b], &self.rhs[c]);
        let mut num: V3<I> = std::array::from_fn(|i| {
            ha.clone() * cbc[i].clone() + hb.clone() * cca[i].clone() + hc.clone() * cab[i].clone()
        });
        if det.is_negative() {
            det = -det;
            for x in num.iter_mut() {
                *x = -x.clone();
            }
        }
        if !num[2].is_positive() {
            return None;
        }
        let v = Vertex { num, det };
        let n = self.n_sides;
        let (pa, pb, pc) = (a / n, b / n, c / n);
        if !self.on_closed_boundary(&v, pa) {
            return None;
        }
        if pb != pa && !self.on_closed_boundary(&v, pb) {
            return None;
        }
        if pc != pa && pc != pb && !self.on_closed_boundary(&v, pc) {
            return None;
        }
        Some(v)
    }

    /// Visits every valid pinned vertex, in parallel over the first plane.
    fn scan<A, M, F>(&self, make: M, visit: F) -> Vec<A>
    where
        A: Send,
        M: Fn() -> A + Sync + Send,
        F: Fn(&mut A, [usize; 3], &Vertex<I>) + Sync + Send,
    {
        let n = self.n_sides;
        let total = self.plane_count();
        (0..total)
            .into_par_iter()
            .fold(&make, |mut acc, a| {
                for b in a + 1..total {
                    if a / n == b / n && !self.adjacent_sides(a % n, b % n) {
                        continue;
                    }
                    let cab = cross(self.row(a), self.row(b));
                    if is_zero3(&cab) {
                        continue;
                    }
                    for c in b + 1..total {
                        if c / n == a / n && c / n == b / n {
                            continue;
                        }
                        if let Some(v) = self.solve([a, b, c], &cab) {
                            visit(&mut acc, [a, b, c], &v);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Interior mask plus each boundary point's tight sides.
    fn classify_all(&self, v: &Vertex<I>) -> (PointMask, Vec<(usize, Vec<u32>)>) {
        let mut interior = PointMask::empty(self.n_points);
        let mut boundary = Vec::new();
        for q in 0..self.n_points {
            match self.classify(v, q) {
                PointClass::Inside => interior.insert(q),
                PointClass::Boundary(t) => boundary.push((q, t)),
                PointClass::Outside => {}
            }
        }
        (interior, boundary)
    }

    /// Ranges of all open cells incident to the vertex.
    fn local_ranges(&self, v: &Vertex<I>) -> Vec<PointMask> {
        let (interior, boundary) = self.classify_all(v);
        let tight: usize = boundary.iter().map(|(_, t)| t.len()).sum();
        let mut out = Vec::new();
        if tight == 3 {
            for bits in 0u32..(1 << boundary.len()) {
                let mut m = interior.clone();
                for (k, (q, _)) in boundary.iter().enumerate() {
                    if bits & (1 << k) != 0 {
                        m.insert(*q);
                    }
                }
                if !m.is_empty() {
                    out.push(m);
                }
            }
            return out;
        }
        let rows: Vec<V3<I>> = boundary
            .iter()
            .flat_map(|(_, t)| t.iter().map(|&j| self.sides[j as usize].clone()))
            .collect();
        for d in cell_directions(&rows) {
            let mut m = interior.clone();
            for (q, t) in &boundary {
                if t.iter().all(|&j| dot(&self.sides[j as usize], &d).is_positive()) {
                    m.insert(*q);
                }
            }
            if !m.is_empty() && !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }

    fn to_homothet(&self, v: &Vertex<I>) -> Homothet {
        let den = v.det.to_big() * &self.scale;
        let q = |x: &I| Rational::new(x.to_big(), den.clone());
        Homothet::new(Point2::new(q(&v.num[0]), q(&v.num[1])), q(&v.num[2]))
    }

    fn vertex_key(&self, v: &Vertex<I>) -> [BigInt; 4] {
        let mut key = [v.num[0].to_big(), v.num[1].to_big(), v.num[2].to_big(), v.det.to_big()];
        let g = key.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() {
            for x in key.iter_mut() {
                *x = &*x / &g;
            }
        }
        key
    }
}

/// Sides as primitive integer rows `(n_x, n_y, b)` and points scaled by a
/// common denominator.
#[allow(clippy::type_complexity)]
fn integer_data(d: &ConvexPolygon, points: &[Point2]) -> (Vec<[BigInt; 3]>, Vec<[BigInt; 2]>, BigInt) {
    let sides = d
        .sides()
        .iter()
        .map(|s| {
            let l = lcm_denoms([&s.normal.x, &s.normal.y, &s.offset].into_iter());
            let v = [&s.normal.x, &s.normal.y, &s.offset].map(|q| (q * Rational::from_integer(l.clone())).to_integer());
            primitive(v)
        })
        .collect();
    let scale = lcm_denoms(points.iter().flat_map(|p| [&p.x, &p.y]));
    let ints = points
        .iter()
        .map(|p| {
            let k = Rational::from_integer(scale.clone());
            [(&p.x * &k).to_integer(), (&p.y * &k).to_integer()]
        })
        .collect();
    (sides, ints, scale)
}

/// Exact integer evaluation of side functions against arbitrary homothets.
pub(crate) struct IntFrame {
    kernel: Kernel<BigInt>,
}

impl IntFrame {
    pub(crate) fn new(d: &ConvexPolygon, points: &[Point2]) -> Self {
        IntFrame { kernel: Kernel::new(d, points) }
    }

    /// `n_j·(p - c) - s·b_j` for every point `p` and side `j` (index
    /// `p*n + j`), all multiplied by one positive factor.
    pub(crate) fn side_values(&self, h: &Homothet) -> Vec<BigInt> {
        let k = &self.kernel;
        let den = h.center.x.denom().lcm(h.center.y.denom()).lcm(h.scale.denom());
        let lift = |q: &Rational| q.numer() * (&den / q.denom());
        let w = [lift(&h.center.x), lift(&h.center.y), lift(&h.scale)];
        let per_side: Vec<BigInt> = k.sides.iter().map(|r| dot(r, &w) * &k.scale).collect();
        k.rhs
            .iter()
            .enumerate()
            .map(|(i, r)| r * &den - &per_side[i % k.n_sides])
            .collect()
    }

    pub(crate) fn side_count(&self) -> usize {
        self.kernel.n_sides
    }
}

/// Work that can run on either integer width.
pub(crate) trait KernelTask {
    type Out;
    fn run<I: KInt>(self, kernel: &Kernel<I>) -> Self::Out;
}

pub(crate) fn with_kernel<T: KernelTask>(d: &ConvexPolygon, points: &[Point2], task: T) -> T::Out {
    let (sides, ints, _) = integer_data(d, points);
    let max = sides
        .iter()
        .flat_map(|s| s.iter())
        .chain(ints.iter().flat_map(|p| p.iter()))
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    // the widest product in the kernel has five input factors and a small
    // constant; keep it well inside 127 bits
    if max.bits() <= 23 {
        task.run(&Kernel::<i128>::new(d, points))
    } else {
        task.run(&Kernel::<BigInt>::new(d, points))
    }
}

// ---------------------------------------------------------------------------
// public operations

fn constraints_of(planes: [usize; 3], n: usize) -> [TangencyConstraint; 3] {
    planes.map(|k| TangencyConstraint { point: k / n, side: k % n })
}

/// Every consistent three-tangency homothet, deduplicated by `(c, s)` and
/// ordered by constraint indices.
pub fn enumerate_pinned_candidates(d: &ConvexPolygon, set: &PointSet) -> Result<Vec<PinnedCandidate>> {
    set.require_verified()?;
    Ok(pinned_candidates(d, set.points()))
}

pub(crate) fn pinned_candidates(d: &ConvexPolygon, points: &[Point2]) -> Vec<PinnedCandidate> {
    struct Task;
    impl KernelTask for Task {
        type Out = Vec<([usize; 3], Homothet)>;
        fn run<I: KInt>(self, k: &Kernel<I>) -> Self::Out {
            let parts = k.scan(HashMap::new, |acc: &mut HashMap<[BigInt; 4], ([usize; 3], Vertex<I>)>, planes, v| {
                let key = k.vertex_key(v);
                match acc.get(&key) {
                    Some((p, _)) if *p <= planes => {}
                    _ => {
                        acc.insert(key, (planes, v.clone()));
                    }
                }
            });
            let mut merged: HashMap<[BigInt; 4], ([usize; 3], Vertex<I>)> = HashMap::new();
            for part in parts {
                for (key, (planes, v)) in part {
                    match merged.get(&key) {
                        Some((p, _)) if *p <= planes => {}
                        _ => {
                            merged.insert(key, (planes, v));
                        }
                    }
                }
            }
            let mut out: Vec<_> = merged.into_values().map(|(p, v)| (p, k.to_homothet(&v))).collect();
            out.sort_by_key(|a| a.0);
            out
        }
    }
    let n = d.side_count();
    with_kernel(d, points, Task)
        .into_iter()
        .map(|(planes, homothet)| PinnedCandidate { constraints: constraints_of(planes, n), homothet })
        .collect()
}

/// First homothet (in constraint order) with four or more points on its
/// boundary, if any.
pub(crate) fn find_crowded_boundary(d: &ConvexPolygon, points: &[Point2]) -> Option<(Vec<usize>, Homothet)> {
    struct Task;
    impl KernelTask for Task {
        type Out = Option<(Vec<usize>, Homothet)>;
        fn run<I: KInt>(self, k: &Kernel<I>) -> Self::Out {
            let found = k.scan(
                || None,
                |acc: &mut Option<([usize; 3], Vec<usize>, Homothet)>, planes, v| {
                    if acc.is_some() {
                        return;
                    }
                    let (_, boundary) = k.classify_all(v);
                    if boundary.len() >= 4 {
                        *acc = Some((planes, boundary.into_iter().map(|(q, _)| q).collect(), k.to_homothet(v)));
                    }
                },
            );
            found
                .into_iter()
                .flatten()
                .min_by(|a, b| a.0.cmp(&b.0))
                .map(|(_, pts, h)| (pts, h))
        }
    }
    if points.len() < 4 {
        return None;
    }
    with_kernel(d, points, Task)
}

/// Where a range was first found; used to rebuild an exact witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RangeOrigin {
    Singleton(usize),
    Pinned([TangencyConstraint; 3]),
}

/// All realizable ranges of a point set, in a fixed order (by size, then
/// lexicographically by index list).
#[derive(Clone, Debug)]
pub struct RangeSpace {
    n_points: usize,
    ranges: Vec<PointMask>,
    origins: Vec<RangeOrigin>,
    lookup: HashMap<PointMask, usize>,
}

impl RangeSpace {
    pub fn build(d: &ConvexPolygon, set: &PointSet) -> Result<Self> {
        set.require_verified()?;
        Ok(Self::build_unchecked(d, set.points()))
    }

    /// Skips the general-position gate. Output is meaningless for sets that
    /// are not in general position.
    pub fn build_unchecked(d: &ConvexPolygon, points: &[Point2]) -> Self {
        struct Task;
        impl KernelTask for Task {
            type Out = HashMap<PointMask, RangeOrigin>;
            fn run<I: KInt>(self, k: &Kernel<I>) -> Self::Out {
                let n = k.n_sides;
                let parts = k.scan(HashMap::new, |acc: &mut HashMap<PointMask, RangeOrigin>, planes, v| {
                    let origin = RangeOrigin::Pinned(constraints_of(planes, n));
                    for m in k.local_ranges(v) {
                        keep_min(acc, m, origin);
                    }
                });
                let mut merged = HashMap::new();
                for part in parts {
                    for (m, o) in part {
                        keep_min(&mut merged, m, o);
                    }
                }
                merged
            }
        }
        let n_points = points.len();
        let mut found = if n_points >= 2 { with_kernel(d, points, Task) } else { HashMap::new() };
        for p in 0..n_points {
            keep_min(&mut found, PointMask::from_indices(n_points, &[p]), RangeOrigin::Singleton(p));
        }
        let mut entries: Vec<(Vec<usize>, PointMask, RangeOrigin)> =
            found.into_iter().map(|(m, o)| (m.to_vec(), m, o)).collect();
        entries.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        let mut ranges = Vec::with_capacity(entries.len());
        let mut origins = Vec::with_capacity(entries.len());
        let mut lookup = HashMap::with_capacity(entries.len());
        for (i, (_, m, o)) in entries.into_iter().enumerate() {
            lookup.insert(m.clone(), i);
            ranges.push(m);
            origins.push(o);
        }
        RangeSpace { n_points, ranges, origins, lookup }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn masks(&self) -> &[PointMask] {
        &self.ranges
    }

    pub fn origin(&self, i: usize) -> RangeOrigin {
        self.origins[i]
    }

    pub fn index_sets(&self) -> Vec<Vec<usize>> {
        self.ranges.iter().map(|m| m.to_vec()).collect()
    }

    pub fn find(&self, indices: &[usize]) -> Option<usize> {
        self.lookup.get(&PointMask::from_indices(self.n_points, indices)).copied()
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.find(indices).is_some()
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.contains(&[u, v])
    }

    /// An open homothet whose intersection with the point set is exactly
    /// range `i`, with no point on its boundary.
    pub fn open_witness(&self, d: &ConvexPolygon, points: &[Point2], i: usize) -> Result<Homothet> {
        match self.origins[i] {
            RangeOrigin::Singleton(p) => Ok(singleton_witness(d, points, p)),
            RangeOrigin::Pinned(cs) => open_witness_at(d, points, cs, &self.ranges[i]),
        }
    }

    /// Open witnesses for every range, in range order.
    pub fn open_witnesses(&self, d: &ConvexPolygon, points: &[Point2]) -> Result<Vec<Homothet>> {
        let k = Kernel::<BigInt>::new(d, points);
        let n = k.n_sides;
        (0..self.ranges.len())
            .into_par_iter()
            .map(|i| match self.origins[i] {
                RangeOrigin::Singleton(p) => Ok(singleton_witness(d, points, p)),
                RangeOrigin::Pinned(cs) => k.open_witness(cs.map(|c| c.point * n + c.side), &self.ranges[i]),
            })
            .collect()
    }

    pub fn report(&self, d: &ConvexPolygon, points: &[Point2], i: usize) -> Result<RangeReport> {
        let h = self.open_witness(d, points, i)?;
        realized_range(d, points, &h)
    }

    fn monochromatic(&self, i: usize, colors: &[u32]) -> bool {
        let mut it = self.ranges[i].iter();
        let first = it.next().map(|p| colors[p]);
        it.all(|p| Some(colors[p]) == first)
    }

    /// Index of a largest monochromatic range (first in range order).
    pub fn max_monochromatic(&self, colors: &[u32]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..self.ranges.len() {
            let size = self.ranges[i].count();
            if best.is_some_and(|(_, b)| b >= size) {
                continue;
            }
            if self.monochromatic(i, colors) {
                best = Some((i, size));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Index of the first monochromatic range containing all of `base`.
    pub fn monochromatic_superrange(&self, colors: &[u32], base: &[usize]) -> Option<usize> {
        let want = PointMask::from_indices(self.n_points, base);
        (0..self.ranges.len()).find(|&i| want.is_subset(&self.ranges[i]) && self.monochromatic(i, colors))
    }
}

fn keep_min(map: &mut HashMap<PointMask, RangeOrigin>, m: PointMask, o: RangeOrigin) {
    map.entry(m).and_modify(|e| *e = (*e).min(o)).or_insert(o);
}

fn singleton_witness(d: &ConvexPolygon, points: &[Point2], p: usize) -> Homothet {
    let c = points[p].clone();
    let nearest = points
        .iter()
        .enumerate()
        .filter(|&(q, _)| q != p)
        .map(|(_, q)| convex_distance(d, &c, q))
        .min()
        .unwrap_or_else(|| Rational::from_integer(2.into()));
    Homothet::new(c, nearest / Rational::from_integer(2.into()))
}

impl<I: KInt> Kernel<I> {
    /// An open homothet realizing `target`, found by stepping from the pinned
    /// vertex into the matching incident cell. The step `1/m` is chosen so
    /// that no nonzero slack changes sign.
    fn open_witness(&self, planes: [usize; 3], target: &PointMask) -> Result<Homothet> {
        let cab = cross(self.row(planes[0]), self.row(planes[1]));
        let v = self
            .solve(planes, &cab)
            .ok_or_else(|| Error::Internal("witness constraints are singular".into()))?;
        let (interior, boundary) = self.classify_all(&v);
        if !interior.is_subset(target) {
            return Err(Error::Internal(format!("{target:?} misses interior points {interior:?}")));
        }
        let tight: Vec<(usize, usize)> =
            boundary.iter().flat_map(|(q, js)| js.iter().map(move |&j| (*q, j as usize))).collect();
        let dir: V3<I> = if tight.len() == 3 {
            let rows: Vec<&V3<I>> = tight.iter().map(|&(_, j)| &self.sides[j]).collect();
            let sign = |k: usize| I::from(if target.contains(tight[k].0) { 1 } else { -1 });
            let parts = [cross(rows[1], rows[2]), cross(rows[2], rows[0]), cross(rows[0], rows[1])];
            let mut d: V3<I> = std::array::from_fn(|i| {
                sign(0) * parts[0][i].clone() + sign(1) * parts[1][i].clone() + sign(2) * parts[2][i].clone()
            });
            if dot(rows[0], &parts[0]).is_negative() {
                d = d.map(|x| -x);
            }
            d
        } else {
            let rows: Vec<V3<I>> = tight.iter().map(|&(_, j)| self.sides[j].clone()).collect();
            cell_directions(&rows)
                .into_iter()
                .find(|d| {
                    boundary.iter().all(|(q, js)| {
                        let inside = js.iter().all(|&j| dot(&self.sides[j as usize], d).is_positive());
                        inside == target.contains(*q)
                    })
                })
                .ok_or_else(|| Error::Internal("no incident cell realizes the range".into()))?
        };

        // new slack of plane k is proportional to slack_k·m - row_k·dir
        let mut m = I::one();
        for q in 0..self.n_points {
            for j in 0..self.n_sides {
                let s = self.slack(&v, q, j).abs();
                if !s.is_zero() {
                    let need = dot(&self.sides[j], &dir).abs() / s + I::one();
                    if need > m {
                        m = need;
                    }
                }
            }
        }
        if dir[2].is_negative() {
            let need = dir[2].abs() / v.num[2].clone() + I::one();
            if need > m {
                m = need;
            }
        }
        let moved = Vertex {
            num: std::array::from_fn(|i| v.num[i].clone() * m.clone() + dir[i].clone()),
            det: v.det.clone() * m,
        };
        let (inside, on) = self.classify_all(&moved);
        if !on.is_empty() || inside != *target {
            return Err(Error::Internal(format!("witness step does not reproduce {target:?}")));
        }
        Ok(self.to_homothet(&moved))
    }
}

fn open_witness_at(
    d: &ConvexPolygon,
    points: &[Point2],
    cs: [TangencyConstraint; 3],
    target: &PointMask,
) -> Result<Homothet> {
    // the stepped vertex has roughly twice the bit length of the inputs, so
    // this always runs on BigInt
    let k = Kernel::<BigInt>::new(d, points);
    let n = k.n_sides;
    k.open_witness(cs.map(|c| c.point * n + c.side), target)
}

pub fn enumerate_ranges(d: &ConvexPolygon, set: &PointSet) -> Result<RangeSpace> {
    RangeSpace::build(d, set)
}

pub fn is_delaunay_edge(d: &ConvexPolygon, set: &PointSet, u: usize, v: usize) -> Result<bool> {
    if u == v || u >= set.len() || v >= set.len() {
        return Err(Error::InvalidArgument(format!("bad vertex pair ({u}, {v})")));
    }
    Ok(RangeSpace::build(d, set)?.is_edge(u, v))
}

fn check_colors(set: &PointSet, colors: &[u32]) -> Result<()> {
    if colors.len() != set.len() {
        return Err(Error::InvalidArgument(format!(
            "{} colors for {} points",
            colors.len(),
            set.len()
        )));
    }
    Ok(())
}

/// Size of a largest monochromatic realizable range, with a witness.
pub fn max_monochromatic_range(
    d: &ConvexPolygon,
    set: &PointSet,
    colors: &[u32],
) -> Result<(usize, Option<RangeReport>)> {
    check_colors(set, colors)?;
    let space = RangeSpace::build(d, set)?;
    match space.max_monochromatic(colors) {
        Some(i) => Ok((space.masks()[i].count(), Some(space.report(d, set.points(), i)?))),
        None => Ok((0, None)),
    }
}

/// A monochromatic realizable range containing all of `base`, if one exists.
pub fn exists_monochromatic_superrange(
    d: &ConvexPolygon,
    set: &PointSet,
    colors: &[u32],
    base: &[usize],
) -> Result<Option<RangeReport>> {
    check_colors(set, colors)?;
    let space = RangeSpace::build(d, set)?;
    match space.monochromatic_superrange(colors, base) {
        Some(i) => Ok(Some(space.report(d, set.points(), i)?)),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{int, Point2};

    fn set(d: &ConvexPolygon, v: &[(i64, i64)]) -> PointSet {
        PointSet::verified(d, v.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect()).unwrap()
    }

    #[test]
    fn pinned_example_from_three_sides() {
        let d = ConvexPolygon::square();
        let s = set(&d, &[(0, 0), (3, 1), (1, 2)]);
        let cands = enumerate_pinned_candidates(&d, &s).unwrap();
        // sides: 0 bottom, 1 right, 2 top, 3 left
        let want = [
            TangencyConstraint { point: 0, side: 3 },
            TangencyConstraint { point: 1, side: 1 },
            TangencyConstraint { point: 2, side: 2 },
        ];
        let hit = cands.iter().find(|c| {
            let mut cs = c.constraints.to_vec();
            cs.sort();
            cs == want
        });
        assert_eq!(hit.unwrap().homothet, Homothet::new(Point2::new(crate::geometry::rat(3, 2), crate::geometry::rat(1, 2)), crate::geometry::rat(3, 2)));
        for c in &cands {
            assert!(c.homothet.scale > Rational::zero());
            let r = realized_range(&d, s.points(), &c.homothet).unwrap();
            for tc in c.constraints {
                assert!(r.boundary.contains(&tc.point));
            }
        }
    }

    #[test]
    fn single_point_has_no_pinned_candidates() {
        let d = ConvexPolygon::triangle();
        let s = set(&d, &[(3, 7)]);
        assert!(enumerate_pinned_candidates(&d, &s).unwrap().is_empty());
        assert_eq!(enumerate_ranges(&d, &s).unwrap().index_sets(), vec![vec![0]]);
    }

    #[test]
    fn unverified_sets_are_refused() {
        let d = ConvexPolygon::square();
        let s = PointSet::new(vec![Point2::from_ints(0, 0)]).unwrap();
        assert_eq!(enumerate_ranges(&d, &s).unwrap_err(), Error::GeneralPositionUnverified);
    }

    #[test]
    fn realized_range_examples() {
        let d = ConvexPolygon::square();
        let s = set(&d, &[(0, 0), (3, 1), (1, 2)]);
        let r = realized_range(&d, s.points(), &Homothet::new(Point2::new(crate::geometry::rat(3, 2), crate::geometry::rat(1, 2)), crate::geometry::rat(3, 2))).unwrap();
        assert!(r.interior.is_empty());
        assert_eq!(r.boundary, vec![0, 1, 2]);
        assert_eq!(r.realizable_ranges().len(), 7);
        let tiny = Homothet::new(Point2::from_ints(3, 1), crate::geometry::rat(1, 10));
        let r = realized_range(&d, s.points(), &tiny).unwrap();
        assert_eq!((r.interior, r.boundary), (vec![1], vec![]));
        let huge = Homothet::new(Point2::from_ints(0, 0), int(100));
        assert_eq!(realized_range(&d, s.points(), &huge).unwrap().interior, vec![0, 1, 2]);
        assert!(realized_range(&d, s.points(), &Homothet::new(Point2::from_ints(0, 0), int(0))).is_err());
    }

    #[test]
    fn three_point_square_realizes_everything() {
        let d = ConvexPolygon::square();
        let s = set(&d, &[(0, 0), (3, 1), (1, 2)]);
        let space = enumerate_ranges(&d, &s).unwrap();
        assert_eq!(
            space.index_sets(),
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        for (u, v) in [(0, 1), (0, 2), (1, 2)] {
            assert!(is_delaunay_edge(&d, &s, u, v).unwrap());
            assert!(is_delaunay_edge(&d, &s, v, u).unwrap());
        }
    }

    #[test]
    fn two_far_points() {
        let d = ConvexPolygon::square();
        let s = set(&d, &[(0, 0), (10, 1)]);
        assert_eq!(enumerate_ranges(&d, &s).unwrap().index_sets(), vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn witnesses_reproduce_ranges() {
        let d = ConvexPolygon::triangle();
        let s = set(&d, &[(0, 0), (5, 1), (2, 7), (9, 4), (4, 3)]);
        let space = enumerate_ranges(&d, &s).unwrap();
        for i in 0..space.len() {
            let r = space.report(&d, s.points(), i).unwrap();
            assert!(r.boundary.is_empty());
            assert_eq!(r.interior, space.masks()[i].to_vec());
        }
    }

    #[test]
    fn monochromatic_queries() {
        let d = ConvexPolygon::square();
        let s = set(&d, &[(0, 0), (3, 1), (1, 2)]);
        let (size, w) = max_monochromatic_range(&d, &s, &[1, 1, 2]).unwrap();
        assert_eq!(size, 2);
        assert_eq!(w.unwrap().interior, vec![0, 1]);
        assert_eq!(max_monochromatic_range(&d, &s, &[1, 1, 1]).unwrap().0, 3);
        assert_eq!(max_monochromatic_range(&d, &s, &[1, 2, 3]).unwrap().0, 1);
        assert!(exists_monochromatic_superrange(&d, &s, &[1, 1, 2], &[0, 1]).unwrap().is_some());
        assert!(exists_monochromatic_superrange(&d, &s, &[1, 1, 2], &[2]).unwrap().is_some());
        assert!(exists_monochromatic_superrange(&d, &s, &[1, 2, 3], &[0, 1, 2]).unwrap().is_none());
    }

    #[test]
    fn integer_widths_agree() {
        // coordinates large enough to force the BigInt kernel
        let d = ConvexPolygon::square();
        let small = [(0, 0), (5, 1), (2, 7), (9, 4), (4, 3), (7, 9)];
        let big: Vec<(i64, i64)> = small.iter().map(|&(x, y)| (x << 30, y << 30)).collect();
        let a = enumerate_ranges(&d, &set(&d, &small)).unwrap().index_sets();
        let b = enumerate_ranges(&d, &set(&d, &big)).unwrap().index_sets();
        assert_eq!(a, b);
    }

    #[test]
    fn cell_directions_of_coordinate_planes() {
        let rows: Vec<V3<i128>> = vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        assert_eq!(cell_directions(&rows).len(), 8);
        // a fourth plane through the same point splits four of the octants
        let rows: Vec<V3<i128>> = vec![[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
        assert_eq!(cell_directions(&rows).len(), 14);
    }
}
