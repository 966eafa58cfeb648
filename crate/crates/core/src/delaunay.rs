//! Incremental Delaunay triangulation in two and three dimensions.
//!
//! Bowyer-Watson insertion over a cell complex closed by an infinite vertex:
//! every convex-hull facet carries a ghost cell, so points outside the hull
//! need no bounding simplex. All orientation and in-sphere signs come from
//! the adaptive exact predicates of the `robust` crate.
//!
//! Cells store `K = D + 1` vertices, positively oriented. A ghost cell holds
//! [`INFINITE`] in one slot and is oriented so that substituting a point
//! strictly outside its hull facet yields a positive orientation.
//!
//! Cospherical configurations are resolved by whichever cells were created
//! first; the result is one valid Delaunay triangulation among several.

use rustc_hash::FxHashMap;

use robust::{Coord, Coord3D};

pub const INFINITE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX - 1;

/// Why no full-dimensional triangulation exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Fewer than `D + 1` points.
    TooFewPoints,
    AllCollinear,
    AllCoplanar,
}

#[derive(Debug, Clone, Copy)]
struct Cell<const K: usize> {
    v: [u32; K],
    n: [u32; K],
}

/// A Delaunay triangulation over points in `R^2` (`K = 3`) or `R^3`
/// (`K = 4`). Coordinates are stored padded to three components.
#[derive(Debug, Clone)]
pub struct Triangulation<const K: usize> {
    pts: Vec<[f64; 3]>,
    cells: Vec<Cell<K>>,
    free: Vec<u32>,
    // scratch
    mark: Vec<u32>,
    epoch: u32,
    last: u32,
}

impl<const K: usize> Triangulation<K> {
    /// Triangulates `pts` (third coordinate ignored when `K == 3`).
    /// Points must be pairwise distinct.
    pub fn new(pts: Vec<[f64; 3]>) -> Result<Self, Degeneracy> {
        assert!(K == 3 || K == 4, "only 2D and 3D triangulations are supported");
        let n = pts.len();
        if n < K {
            return Err(Degeneracy::TooFewPoints);
        }
        let order = spatial_order(&pts, K - 1);
        let mut tri = Self {
            pts,
            cells: Vec::with_capacity(n * if K == 3 { 2 } else { 7 }),
            free: Vec::new(),
            mark: Vec::new(),
            epoch: 0,
            last: 0,
        };
        let seed = tri.initial_simplex(&order)?;
        tri.seed(seed);
        let mut used = [false; 4];
        for &p in &order {
            if let Some(i) = seed.iter().position(|&s| s == p) {
                if !used[i] {
                    used[i] = true;
                    continue;
                }
            }
            tri.insert(p);
        }
        Ok(tri)
    }

    pub fn num_points(&self) -> usize {
        self.pts.len()
    }

    /// Vertex tuples of all finite cells.
    pub fn cells(&self) -> impl Iterator<Item = [u32; K]> + '_ {
        self.cells
            .iter()
            .filter(|c| c.v[0] != DEAD && !c.v.contains(&INFINITE))
            .map(|c| c.v)
    }

    /// Hull facets, as the finite vertices of each ghost cell.
    pub fn hull_facets(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.cells
            .iter()
            .filter(|c| c.v[0] != DEAD && c.v.contains(&INFINITE))
            .map(|c| c.v.iter().copied().filter(|&v| v != INFINITE).collect())
    }

    /// Sorted, deduplicated edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.cells.len() * K);
        for c in self.cells() {
            for i in 0..K {
                for j in i + 1..K {
                    let (a, b) = (c[i].min(c[j]), c[i].max(c[j]));
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks the combinatorial and geometric invariants: positive
    /// orientation, symmetric adjacency, empty open circumspheres (by brute
    /// force over all points). Quadratic; intended for tests.
    pub fn validate(&self) -> Result<(), String> {
        for (ci, c) in self.cells.iter().enumerate() {
            if c.v[0] == DEAD {
                continue;
            }
            for s in 0..K {
                let nb = c.n[s];
                let other = &self.cells[nb as usize];
                if other.v[0] == DEAD {
                    return Err(format!("cell {ci} links to dead cell {nb}"));
                }
                if !other.n.contains(&(ci as u32)) {
                    return Err(format!("adjacency {ci} -> {nb} is not symmetric"));
                }
                let shared = c.v.iter().filter(|v| other.v.contains(v)).count();
                if shared != K - 1 {
                    return Err(format!("cells {ci} and {nb} share {shared} vertices"));
                }
            }
            if c.v.contains(&INFINITE) {
                continue;
            }
            if self.orient(&c.v) <= 0.0 {
                return Err(format!("cell {ci} is not positively oriented"));
            }
            for p in 0..self.pts.len() as u32 {
                if !c.v.contains(&p) && self.in_sphere(&c.v, p) > 0.0 {
                    return Err(format!("point {p} lies inside circumsphere of cell {ci}"));
                }
            }
        }
        Ok(())
    }

    // ---- predicates ---------------------------------------------------

    #[inline]
    fn orient(&self, v: &[u32; K]) -> f64 {
        let p = |i: usize| self.pts[v[i] as usize];
        if K == 3 {
            robust::orient2d(c2(p(0)), c2(p(1)), c2(p(2)))
        } else {
            // robust::orient3d is positive when the fourth point lies below
            // the plane of the first three; negate for a right-handed sign.
            -robust::orient3d(c3(p(0)), c3(p(1)), c3(p(2)), c3(p(3)))
        }
    }

    /// Orientation of `v` with slot `s` replaced by point `p`.
    #[inline]
    fn orient_with(&self, v: &[u32; K], s: usize, p: u32) -> f64 {
        let mut w = *v;
        w[s] = p;
        self.orient(&w)
    }

    /// Positive when `p` is strictly inside the circumsphere of the
    /// positively oriented finite cell `v`.
    #[inline]
    fn in_sphere(&self, v: &[u32; K], p: u32) -> f64 {
        let q = |i: usize| self.pts[v[i] as usize];
        let e = self.pts[p as usize];
        if K == 3 {
            robust::incircle(c2(q(0)), c2(q(1)), c2(q(2)), c2(e))
        } else {
            // insphere expects robust's own positive orientation, which is
            // ours with two vertices swapped.
            robust::insphere(c3(q(1)), c3(q(0)), c3(q(2)), c3(q(3)), c3(e))
        }
    }

    fn conflicts(&self, ci: u32, p: u32) -> bool {
        let c = &self.cells[ci as usize];
        match c.v.iter().position(|&v| v == INFINITE) {
            None => self.in_sphere(&c.v, p) > 0.0,
            Some(s) => {
                let o = self.orient_with(&c.v, s, p);
                if o > 0.0 {
                    true
                } else if o < 0.0 {
                    false
                } else {
                    // p lies in the hull facet's affine hull: it conflicts iff
                    // it is inside the facet's circumcircle, which the finite
                    // neighbour's circumsphere cuts out exactly.
                    let nb = c.n[s];
                    self.in_sphere(&self.cells[nb as usize].v, p) > 0.0
                }
            }
        }
    }

    // ---- construction -------------------------------------------------

    fn initial_simplex(&self, order: &[u32]) -> Result<[u32; 4], Degeneracy> {
        let a = order[0];
        let b = order[1];
        let pa = self.pts[a as usize];
        let pb = self.pts[b as usize];
        let c = order[2..]
            .iter()
            .copied()
            .find(|&c| !collinear(pa, pb, self.pts[c as usize], K - 1))
            .ok_or(Degeneracy::AllCollinear)?;
        if K == 3 {
            return Ok([a, b, c, INFINITE]);
        }
        let pc = self.pts[c as usize];
        let d = order[2..]
            .iter()
            .copied()
            .find(|&d| robust::orient3d(c3(pa), c3(pb), c3(pc), c3(self.pts[d as usize])) != 0.0)
            .ok_or(Degeneracy::AllCoplanar)?;
        Ok([a, b, c, d])
    }

    fn seed(&mut self, s: [u32; 4]) {
        let mut v = [0u32; K];
        v.copy_from_slice(&s[..K]);
        if self.orient(&v) < 0.0 {
            v.swap(0, 1);
        }
        // cell 0 is the finite simplex, cell 1 + i the ghost opposite slot i
        let mut fin = Cell { v, n: [0; K] };
        for i in 0..K {
            fin.n[i] = 1 + i as u32;
        }
        self.cells.push(fin);
        for i in 0..K {
            let mut gv = v;
            gv[i] = INFINITE;
            let (a, b) = other_two(i);
            gv.swap(a, b);
            self.cells.push(Cell { v: gv, n: [0; K] });
        }
        // ghost adjacency: across the slot holding INFINITE is the finite
        // cell; across any other slot is the ghost sharing that ridge
        for gi in 1..=K as u32 {
            for s in 0..K {
                let gv = self.cells[gi as usize].v;
                if gv[s] == INFINITE {
                    self.cells[gi as usize].n[s] = 0;
                    continue;
                }
                let missing = gv[s];
                let slot_in_fin = v.iter().position(|&x| x == missing).expect("seed vertex");
                self.cells[gi as usize].n[s] = 1 + slot_in_fin as u32;
            }
        }
        self.last = 0;
    }

    fn alloc(&mut self, cell: Cell<K>) -> u32 {
        if let Some(i) = self.free.pop() {
            self.cells[i as usize] = cell;
            i
        } else {
            self.cells.push(cell);
            (self.cells.len() - 1) as u32
        }
    }

    /// Visibility walk from the last created cell to a cell in conflict
    /// with `p`.
    fn locate(&self, p: u32) -> u32 {
        let mut ci = self.last;
        if self.cells[ci as usize].v[0] == DEAD {
            ci = self.cells.iter().position(|c| c.v[0] != DEAD).expect("live cell") as u32;
        }
        let mut rot = (p as usize).wrapping_mul(2654435761) % K;
        loop {
            let c = &self.cells[ci as usize];
            if let Some(s) = c.v.iter().position(|&v| v == INFINITE) {
                if self.orient_with(&c.v, s, p) > 0.0 {
                    return ci;
                }
                // On or behind the hull plane: step back inside.
                ci = c.n[s];
                continue;
            }
            let mut moved = false;
            for j in 0..K {
                let s = (j + rot) % K;
                if self.orient_with(&c.v, s, p) < 0.0 {
                    ci = c.n[s];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return ci;
            }
            rot = (rot + 1) % K;
        }
    }

    fn insert(&mut self, p: u32) {
        let start = self.locate(p);
        let start = if self.conflicts(start, p) {
            start
        } else {
            // Ghost reached with p on a hull plane outside that facet's
            // circumcircle; some neighbouring cell must conflict.
            self.find_conflict_near(start, p)
        };

        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        if self.mark.len() < self.cells.len() {
            self.mark.resize(self.cells.len(), 0);
        }
        let epoch = self.epoch;
        let mut cavity = vec![start];
        self.mark[start as usize] = epoch;
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        let mut i = 0;
        while i < cavity.len() {
            let ci = cavity[i];
            i += 1;
            for s in 0..K {
                let nb = self.cells[ci as usize].n[s];
                if self.mark[nb as usize] == epoch {
                    continue;
                }
                if self.conflicts(nb, p) {
                    self.mark[nb as usize] = epoch;
                    cavity.push(nb);
                } else {
                    boundary.push((ci, s));
                }
            }
        }

        let mut ridges: FxHashMap<u64, (u32, usize)> = FxHashMap::default();
        // Back-link slots are resolved before any cavity slot is reused.
        let mut created = Vec::with_capacity(boundary.len());
        for &(ci, s) in &boundary {
            let old = self.cells[ci as usize];
            let outside = old.n[s];
            let back = self.cells[outside as usize]
                .n
                .iter()
                .position(|&x| x == ci)
                .expect("outside cell links back");
            let mut v = old.v;
            v[s] = p;
            let mut n = [INFINITE; K];
            n[s] = outside;
            created.push((v, n, s, outside, back));
        }
        for &ci in &cavity {
            self.cells[ci as usize].v[0] = DEAD;
            self.free.push(ci);
        }
        for (v, n, s, outside, back) in created {
            let id = self.alloc(Cell { v, n });
            if self.mark.len() < self.cells.len() {
                self.mark.resize(self.cells.len(), 0);
            }
            self.cells[outside as usize].n[back] = id;
            for j in 0..K {
                if j == s {
                    continue;
                }
                let key = ridge_key(&v, s, j);
                if let Some((other, oj)) = ridges.remove(&key) {
                    self.cells[id as usize].n[j] = other;
                    self.cells[other as usize].n[oj] = id;
                } else {
                    ridges.insert(key, (id, j));
                }
            }
            if !v.contains(&INFINITE) {
                self.last = id;
            }
        }
        debug_assert!(ridges.is_empty(), "unmatched cavity ridges");
    }

    fn find_conflict_near(&self, start: u32, p: u32) -> u32 {
        let mut seen = vec![start];
        let mut i = 0;
        while i < seen.len() {
            let ci = seen[i];
            i += 1;
            if self.conflicts(ci, p) {
                return ci;
            }
            for &nb in &self.cells[ci as usize].n {
                if !seen.contains(&nb) {
                    seen.push(nb);
                }
            }
        }
        unreachable!("every inserted point conflicts with some cell")
    }
}

/// Key for the ridge of cell `v` opposite slots `s` (the new point) and `j`.
#[inline]
fn ridge_key<const K: usize>(v: &[u32; K], s: usize, j: usize) -> u64 {
    let mut rest = [0u32; 2];
    let mut m = 0;
    for (i, &x) in v.iter().enumerate() {
        if i != s && i != j {
            rest[m] = x;
            m += 1;
        }
    }
    if m == 1 {
        rest[0] as u64
    } else {
        let (a, b) = (rest[0].min(rest[1]), rest[0].max(rest[1]));
        ((a as u64) << 32) | b as u64
    }
}

#[inline]
fn other_two(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[inline]
fn c2(p: [f64; 3]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: [f64; 3]) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

fn collinear(a: [f64; 3], b: [f64; 3], c: [f64; 3], dim: usize) -> bool {
    let proj = |p: [f64; 3], i: usize, j: usize| Coord { x: p[i], y: p[j] };
    if dim == 2 {
        return robust::orient2d(proj(a, 0, 1), proj(b, 0, 1), proj(c, 0, 1)) == 0.0;
    }
    [(0, 1), (1, 2), (0, 2)]
        .iter()
        .all(|&(i, j)| robust::orient2d(proj(a, i, j), proj(b, i, j), proj(c, i, j)) == 0.0)
}

/// Insertion order along a Z-order curve, which keeps walks short.
fn spatial_order(pts: &[[f64; 3]], dim: usize) -> Vec<u32> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let bits = if dim == 2 { 16 } else { 10 };
    let scale = ((1u64 << bits) - 1) as f64;
    let mut keyed: Vec<(u64, u32)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut q = [0u64; 3];
            for a in 0..dim {
                let w = hi[a] - lo[a];
                let t = if w > 0.0 { (p[a] - lo[a]) / w } else { 0.0 };
                q[a] = (t * scale) as u64;
            }
            let mut code = 0u64;
            for b in (0..bits).rev() {
                for qa in q.iter().take(dim) {
                    code = (code << 1) | ((qa >> b) & 1);
                }
            }
            (code, i as u32)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}
