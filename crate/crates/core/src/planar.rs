//! Combinatorial plane embeddings given by rotation systems.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// For every vertex, its neighbours in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    rot: Vec<Vec<usize>>,
    edges: HashSet<(usize, usize)>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl RotationSystem {
    pub fn new(rot: Vec<Vec<usize>>) -> Result<Self> {
        let mut edges = HashSet::new();
        for (u, nbrs) in rot.iter().enumerate() {
            for &v in nbrs {
                if v == u || v >= rot.len() {
                    return Err(Error::InvalidArgument(format!("bad neighbour {v} of {u}")));
                }
                if !rot[v].contains(&u) {
                    return Err(Error::InvalidArgument(format!("edge {u}-{v} listed one way only")));
                }
                edges.insert(key(u, v));
            }
            let distinct: HashSet<_> = nbrs.iter().collect();
            if distinct.len() != nbrs.len() {
                return Err(Error::InvalidArgument(format!("repeated neighbour at {u}")));
            }
        }
        Ok(RotationSystem { rot, edges })
    }

    pub fn empty(n: usize) -> Self {
        RotationSystem { rot: vec![Vec::new(); n], edges: HashSet::new() }
    }

    pub fn len(&self) -> usize {
        self.rot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rot.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&key(u, v))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edges.iter().copied().collect();
        e.sort_unstable();
        e
    }

    fn position(&self, v: usize, u: usize) -> usize {
        self.rot[v]
            .iter()
            .position(|&w| w == u)
            .unwrap_or_else(|| panic!("{u} is not a neighbour of {v}"))
    }

    /// The neighbour following `u` counterclockwise around `v`.
    pub fn succ(&self, v: usize, u: usize) -> usize {
        let r = &self.rot[v];
        r[(self.position(v, u) + 1) % r.len()]
    }

    /// The neighbour preceding `u` counterclockwise around `v`.
    pub fn pred(&self, v: usize, u: usize) -> usize {
        let r = &self.rot[v];
        r[(self.position(v, u) + r.len() - 1) % r.len()]
    }

    pub fn add_vertex(&mut self) -> usize {
        self.rot.push(Vec::new());
        self.rot.len() - 1
    }

    /// Inserts `w` into the rotation at `v` right after `anchor` (or as the
    /// only entry when `anchor` is `None`). Callers keep both ends in sync.
    pub fn insert_after(&mut self, v: usize, anchor: Option<usize>, w: usize) {
        match anchor {
            Some(a) => {
                let i = self.position(v, a);
                self.rot[v].insert(i + 1, w);
            }
            None => self.rot[v].push(w),
        }
        self.edges.insert(key(v, w));
    }

    fn remove_half(&mut self, v: usize, w: usize) {
        let i = self.position(v, w);
        self.rot[v].remove(i);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.remove_half(u, v);
        self.remove_half(v, u);
        self.edges.remove(&key(u, v));
    }

    /// Face boundaries, each traced with the face on the left: the dart
    /// `u→v` is followed by `v→pred(v, u)`. With counterclockwise rotations
    /// bounded faces come out counterclockwise and the outer face clockwise.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen: Vec<Vec<bool>> = self.rot.iter().map(|r| vec![false; r.len()]).collect();
        let mut faces = Vec::new();
        for u in 0..self.rot.len() {
            for k in 0..self.rot[u].len() {
                if seen[u][k] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (u, self.rot[u][k]);
                loop {
                    let i = self.position(a, b);
                    if seen[a][i] {
                        break;
                    }
                    seen[a][i] = true;
                    face.push(a);
                    let next = self.pred(b, a);
                    a = b;
                    b = next;
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.rot.len()];
        let mut out = Vec::new();
        for s in 0..self.rot.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut stack = vec![s];
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &self.rot[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Euler's formula per component: `V - E + F = 2` for every component
    /// with an edge. Holds exactly when the rotation system is planar.
    pub fn is_planar_embedding(&self) -> bool {
        let faces = self.faces();
        let mut face_count = vec![0usize; self.rot.len()];
        for f in &faces {
            face_count[f[0]] += 1;
        }
        self.components().iter().all(|c| {
            let e: usize = c.iter().map(|&v| self.rot[v].len()).sum::<usize>() / 2;
            if e == 0 {
                return true;
            }
            let f: usize = c.iter().map(|&v| face_count[v]).sum();
            c.len() + f == e + 2
        })
    }
}

/// A seeded random maximal planar graph on `n ≥ 3` vertices:
/// repeated insertion into random faces followed by random edge flips.
pub fn random_triangulation(n: usize, seed: u64) -> RotationSystem {
    assert!(n >= 3, "a triangulation needs three vertices");
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut g = RotationSystem::new(vec![vec![1, 2], vec![2, 0], vec![0, 1]]).expect("triangle");
    // faces as counterclockwise triples; index 0 is the outer face
    let mut faces: Vec<[usize; 3]> = vec![[0, 2, 1], [0, 1, 2]];
    for _ in 3..n {
        let fi = rng.gen_range(1..faces.len());
        let [a, b, c] = faces[fi];
        let v = g.add_vertex();
        g.rot[v] = vec![a, b, c];
        g.insert_after(a, Some(b), v);
        g.insert_after(b, Some(c), v);
        g.insert_after(c, Some(a), v);
        faces[fi] = [a, b, v];
        faces.push([b, c, v]);
        faces.push([c, a, v]);
    }
    for _ in 0..4 * n {
        let edges = g.edges();
        let (u, v) = edges[rng.gen_range(0..edges.len())];
        let w = g.pred(v, u);
        let x = g.pred(u, v);
        if w == x || g.has_edge(w, x) || g.degree(u) <= 3 || g.degree(v) <= 3 {
            continue;
        }
        // faces u,v,w and v,u,x become w,x,v and x,w,u
        g.remove_edge(u, v);
        g.insert_after(w, Some(u), x);
        g.insert_after(x, Some(v), w);
    }
    g
}
