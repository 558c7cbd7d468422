//! 3-coloring a plane graph so that every monochromatic component is a path.
//!
//! The graph is first completed to a triangulation: every face walk of
//! length four or more gets a ring of new vertices along its boundary and a
//! hub in the middle. Each component is then colored by the two-path
//! recursion. A region is a disk bounded by a cycle `P·Q` where `P` and `Q`
//! are induced paths already colored `cp` and `cq`; the recursion colors
//! its interior so that no interior vertex colored `cp` touches `P` and none
//! colored `cq` touches `Q`. A chord between `P` and `Q` splits the region in
//! two. Without chords, a shortest path `R` through interior neighbours of
//! `P` joins the apexes at both ends of `P`; `R` takes the third color and
//! becomes the new second path of the regions on either side. Deleting the
//! added vertices keeps every monochromatic component a path.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::planar::RotationSystem;

/// One color per vertex, values starting at 1.
pub type Coloring = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathViolation {
    LengthMismatch { colors: usize, vertices: usize },
    /// A vertex with three or more neighbours of its own color.
    Branch { vertex: usize, color: u32 },
    /// A monochromatic cycle, given by the vertices of its component.
    Cycle { vertices: Vec<usize>, color: u32 },
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathViolation::LengthMismatch { colors, vertices } => {
                write!(f, "{colors} colors for {vertices} vertices")
            }
            PathViolation::Branch { vertex, color } => {
                write!(f, "vertex {vertex} has degree above 2 in color class {color}")
            }
            PathViolation::Cycle { vertices, color } => {
                write!(f, "color class {color} contains a cycle through {vertices:?}")
            }
        }
    }
}

/// Checks that every component of every color class is a simple path.
pub fn verify_path_property(g: &RotationSystem, colors: &[u32]) -> std::result::Result<(), PathViolation> {
    if colors.len() != g.len() {
        return Err(PathViolation::LengthMismatch { colors: colors.len(), vertices: g.len() });
    }
    for v in 0..g.len() {
        let same = g.neighbors(v).iter().filter(|&&w| colors[w] == colors[v]).count();
        if same > 2 {
            return Err(PathViolation::Branch { vertex: v, color: colors[v] });
        }
    }
    // with degrees at most 2, a component is a path iff it has fewer edges
    // than vertices
    let mut seen = vec![false; g.len()];
    for s in 0..g.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut members = Vec::new();
        let mut degree_sum = 0;
        while let Some(v) = stack.pop() {
            members.push(v);
            for &w in g.neighbors(v) {
                if colors[w] == colors[v] {
                    degree_sum += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        if degree_sum / 2 >= members.len() {
            members.sort_unstable();
            return Err(PathViolation::Cycle { vertices: members, color: colors[s] });
        }
    }
    Ok(())
}

/// Adds a ring and a hub inside every face walk of length at least four.
/// Returns the triangulated copy; original vertices keep their indices.
pub fn triangulate(g: &RotationSystem) -> RotationSystem {
    let mut h = g.clone();
    for walk in g.faces() {
        let len = walk.len();
        if len < 4 {
            continue;
        }
        let ring: Vec<usize> = (0..len).map(|_| h.add_vertex()).collect();
        let hub = h.add_vertex();
        for i in 0..len {
            let (w0, w1, w2) = (walk[i], walk[(i + 1) % len], walk[(i + 2) % len]);
            // corner at w1 between w2 and w0: gains ring[i+1], then ring[i]
            h.insert_after(w1, Some(w2), ring[i]);
            h.insert_after(w1, Some(w2), ring[(i + 1) % len]);
            let z = ring[i];
            for w in [w0, w1, ring[(i + 1) % len], hub, ring[(i + len - 1) % len]] {
                h.insert_after(z, None, w);
            }
            h.insert_after(hub, None, z);
        }
    }
    h
}

struct Region {
    p: Vec<usize>,
    cp: u32,
    q: Vec<usize>,
    cq: u32,
    inner: Vec<usize>,
}

struct Scratch {
    stamp: Vec<u32>,
    tag: Vec<u32>,
    now: u32,
}

impl Scratch {
    fn next(&mut self) -> u32 {
        self.now += 1;
        self.now
    }
}

/// Connected components of the subgraph induced by `vs`.
fn components(h: &RotationSystem, vs: &[usize], sc: &mut Scratch) -> Vec<Vec<usize>> {
    let member = sc.next();
    for &v in vs {
        sc.stamp[v] = member;
    }
    let done = sc.next();
    let mut out = Vec::new();
    for &s in vs {
        if sc.stamp[s] != member {
            continue;
        }
        sc.stamp[s] = done;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &w in h.neighbors(v) {
                if sc.stamp[w] == member {
                    sc.stamp[w] = done;
                    comp.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Neighbours of `v` strictly inside the region, whose boundary enters `v`
/// from `prev` and leaves towards `next`.
fn inside_fan(h: &RotationSystem, v: usize, prev: usize, next: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut w = h.succ(v, next);
    while w != prev {
        out.push(w);
        w = h.succ(v, w);
    }
    out
}

fn color_region(h: &RotationSystem, r: Region, colors: &mut [u32], sc: &mut Scratch, work: &mut Vec<Region>) -> Result<()> {
    let (k, l) = (r.p.len(), r.q.len());
    // a two-vertex "cycle" is a single edge seen from both sides
    if r.inner.is_empty() && k + l <= 3 {
        return Ok(());
    }
    // positions along Q, for chord lookup
    let on_q = sc.next();
    for (j, &v) in r.q.iter().enumerate() {
        sc.stamp[v] = on_q;
        sc.tag[v] = j as u32;
    }
    let mut chord = None;
    'scan: for i in 0..k {
        let prev = if i == 0 { r.q[l - 1] } else { r.p[i - 1] };
        let next = if i + 1 == k { r.q[0] } else { r.p[i + 1] };
        for w in inside_fan(h, r.p[i], prev, next) {
            if sc.stamp[w] == on_q {
                chord = Some((i, sc.tag[w] as usize));
                break 'scan;
            }
        }
    }

    if let Some((i, j)) = chord {
        let comps = components(h, &r.inner, sc);
        let private = sc.next();
        for &v in r.p[..i].iter().chain(&r.q[j + 1..]) {
            sc.stamp[v] = private;
        }
        let (mut in1, mut in2) = (Vec::new(), Vec::new());
        for comp in comps {
            if comp.iter().any(|&v| h.neighbors(v).iter().any(|&w| sc.stamp[w] == private)) {
                in1.extend(comp);
            } else {
                in2.extend(comp);
            }
        }
        work.push(Region { p: r.p[..=i].to_vec(), cp: r.cp, q: r.q[j..].to_vec(), cq: r.cq, inner: in1 });
        work.push(Region { p: r.p[i..].to_vec(), cp: r.cp, q: r.q[..=j].to_vec(), cq: r.cq, inner: in2 });
        return Ok(());
    }

    if r.inner.is_empty() {
        return Err(Error::Internal("chordless empty region is not a triangle".into()));
    }
    let inside = sc.next();
    for &v in &r.inner {
        sc.stamp[v] = inside;
    }
    let x = h.pred(r.p[0], r.q[l - 1]);
    let y = h.succ(r.p[k - 1], r.q[0]);
    if sc.stamp[x] != inside || sc.stamp[y] != inside {
        return Err(Error::Internal("apex of a boundary edge is not interior".into()));
    }
    let near_p = sc.next();
    for &v in &r.p {
        for &w in h.neighbors(v) {
            if sc.stamp[w] == inside {
                sc.stamp[w] = near_p;
            }
        }
    }
    // breadth-first search from x, neighbours in ascending index order
    let reached = sc.next();
    sc.stamp[x] = reached;
    sc.tag[x] = x as u32;
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if v == y {
            break;
        }
        let mut nb: Vec<usize> = h.neighbors(v).iter().copied().filter(|&w| sc.stamp[w] == near_p).collect();
        nb.sort_unstable();
        for w in nb {
            sc.stamp[w] = reached;
            sc.tag[w] = v as u32;
            queue.push_back(w);
        }
    }
    if sc.stamp[y] != reached {
        return Err(Error::Internal("no path along P between the apexes".into()));
    }
    let mut path = vec![y];
    while *path.last().expect("nonempty") != x {
        let v = *path.last().expect("nonempty");
        path.push(sc.tag[v] as usize);
    }
    path.reverse();
    let c3 = 6 - r.cp - r.cq;
    for &v in &path {
        colors[v] = c3;
    }

    let on_r = sc.next();
    for &v in &path {
        sc.stamp[v] = on_r;
    }
    let rest: Vec<usize> = r.inner.iter().copied().filter(|&v| sc.stamp[v] != on_r).collect();
    let comps = components(h, &rest, sc);
    let on_p = sc.next();
    for &v in &r.p {
        sc.stamp[v] = on_p;
    }
    let (mut in_a, mut in_b) = (Vec::new(), Vec::new());
    for comp in comps {
        if comp.iter().any(|&v| h.neighbors(v).iter().any(|&w| sc.stamp[w] == on_p)) {
            in_a.extend(comp);
        } else {
            in_b.extend(comp);
        }
    }
    let mut back = path.clone();
    back.reverse();
    work.push(Region { p: r.p, cp: r.cp, q: back, cq: c3, inner: in_a });
    work.push(Region { p: r.q, cp: r.cq, q: path, cq: c3, inner: in_b });
    Ok(())
}

/// Colors of the original vertices after running the recursion on the
/// triangulated graph.
pub fn poh_coloring(g: &RotationSystem) -> Result<Coloring> {
    let h = triangulate(g);
    let mut colors = vec![0u32; h.len()];
    let mut sc = Scratch { stamp: vec![0; h.len()], tag: vec![0; h.len()], now: 0 };
    let faces = h.faces();
    for comp in h.components() {
        if comp.len() <= 2 {
            for &v in &comp {
                colors[v] = 1;
            }
            continue;
        }
        let first = comp[0];
        let face = faces
            .iter()
            .find(|f| f.contains(&first))
            .ok_or_else(|| Error::Internal("vertex without a face".into()))?;
        if face.len() != 3 {
            return Err(Error::Internal(format!("face {face:?} survived triangulation")));
        }
        let (a, b, c) = (face[0], face[1], face[2]);
        colors[a] = 1;
        colors[c] = 1;
        colors[b] = 2;
        let inner: Vec<usize> = comp.iter().copied().filter(|&v| v != a && v != b && v != c).collect();
        let mut work = vec![Region { p: vec![a, c], cp: 1, q: vec![b], cq: 2, inner }];
        while let Some(r) = work.pop() {
            color_region(&h, r, &mut colors, &mut sc, &mut work)?;
        }
    }
    colors.truncate(g.len());
    Ok(colors)
}
