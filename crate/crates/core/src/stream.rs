//! Lazy enumeration of all edges in the total order.
//!
//! Row `y` of the neighbour table lists the points with larger label than
//! `y`, nearest first. Only the `k` nearest are computed up front; a row that
//! runs out is extended once with every remaining larger-label point. The
//! heap holds at most one candidate per row, so its top is always the next
//! edge overall.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::cloud::{PointCloud, PointId};
use crate::scalar::Scalar;
use crate::simplex::{edge_cmp, SimplexKey};
use crate::spatial::SpatialIndex;

/// Default neighbour count `floor(sqrt n)`, at least 1.
pub fn default_k(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

/// Per-row nearest larger-label neighbours.
///
/// The first `k` entries of every row live in one flat array; rows that
/// were extended keep their full list in a side map.
#[derive(Debug)]
pub struct NeighborTable {
    k: usize,
    flat: Vec<PointId>,
    row_len: Vec<u32>,
    extended: FxHashMap<PointId, Vec<PointId>>,
}

impl NeighborTable {
    pub fn build<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, index: &SpatialIndex<T, D>, k: usize) -> Self {
        let n = cloud.len();
        let k = k.clamp(1, n.saturating_sub(1).max(1));
        let mut flat = vec![0 as PointId; n * k];
        let mut row_len = vec![0u32; n];
        flat.par_chunks_mut(k)
            .zip(row_len.par_iter_mut())
            .enumerate()
            .for_each(|(y, (row, len))| {
                let y = y as PointId;
                let nn = index.k_nearest_larger_label_at(cloud.point(y), y, k);
                for (slot, (z, _)) in row.iter_mut().zip(&nn) {
                    *slot = *z;
                }
                *len = nn.len() as u32;
            });
        Self {
            k,
            flat,
            row_len,
            extended: FxHashMap::default(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_rows(&self) -> usize {
        self.row_len.len()
    }

    /// Currently stored neighbours of `y`.
    pub fn row(&self, y: PointId) -> &[PointId] {
        match self.extended.get(&y) {
            Some(r) => r,
            None => {
                let start = y as usize * self.k;
                &self.flat[start..start + self.row_len[y as usize] as usize]
            }
        }
    }

    /// Whether row `y` already lists every larger-label point.
    pub fn is_exhausted(&self, y: PointId) -> bool {
        let larger = self.num_rows() - 1 - y as usize;
        self.row(y).len() == larger
    }

    /// Number of rows that needed an extension.
    pub fn extensions(&self) -> usize {
        self.extended.len()
    }

    /// Rebuilds row `y` with all larger-label points sorted by
    /// `(squared distance, label)`.
    pub fn extend<T: Scalar, const D: usize>(&mut self, y: PointId, cloud: &PointCloud<T, D>) {
        if self.is_exhausted(y) {
            return;
        }
        let mut all: Vec<(T, PointId)> = ((y + 1)..cloud.len() as PointId)
            .map(|z| (cloud.dist_sq(y, z), z))
            .collect();
        all.sort_unstable_by(|a, b| edge_cmp((a.0, y, a.1), (b.0, y, b.1)));
        let row = all.into_iter().map(|(_, z)| z).collect();
        self.extended.insert(y, row);
    }

    pub fn memory_bytes(&self) -> usize {
        self.flat.len() * 4 + self.row_len.len() * 4 + self.extended.values().map(|r| r.len() * 4 + 48).sum::<usize>()
    }
}

/// Heap entry `(y, z, t, r)`: edge `<y z>` at position `t` of row `y`, with
/// squared length `r`.
#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    r: T,
    y: PointId,
    z: PointId,
    t: u32,
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        edge_cmp((self.r, self.y, self.z), (other.r, other.y, other.z))
    }
}

/// Min-heap over row candidates.
#[derive(Debug)]
pub struct EdgeHeap<T: Scalar> {
    heap: BinaryHeap<Reverse<Candidate<T>>>,
}

impl<T: Scalar> EdgeHeap<T> {
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Smallest pending edge as `(y, z, squared length)`.
    pub fn peek(&self) -> Option<(PointId, PointId, T)> {
        self.heap.peek().map(|Reverse(c)| (c.y, c.z, c.r))
    }
}

/// Edges of the complete graph in the total order, produced on demand.
#[derive(Debug)]
pub struct EdgeStream<'a, T: Scalar, const D: usize> {
    cloud: &'a PointCloud<T, D>,
    table: NeighborTable,
    heap: EdgeHeap<T>,
    emitted: u64,
}

/// Builds the neighbour table with `k` neighbours per row and seeds the heap
/// with each row's nearest entry.
pub fn init_stream<'a, T: Scalar, const D: usize>(
    cloud: &'a PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
    k: usize,
) -> EdgeStream<'a, T, D> {
    let table = NeighborTable::build(cloud, index, k);
    let mut heap = BinaryHeap::with_capacity(cloud.len());
    for y in 0..cloud.len() as PointId {
        if let Some(&z) = table.row(y).first() {
            heap.push(Reverse(Candidate {
                r: cloud.dist_sq(y, z),
                y,
                z,
                t: 0,
            }));
        }
    }
    EdgeStream {
        cloud,
        table,
        heap: EdgeHeap { heap },
        emitted: 0,
    }
}

impl<T: Scalar, const D: usize> EdgeStream<'_, T, D> {
    /// Next edge as `(y, z, squared length)` with `y < z`, or `None` once
    /// all `n (n - 1) / 2` edges were produced.
    pub fn next_edge(&mut self) -> Option<(PointId, PointId, T)> {
        let Reverse(top) = self.heap.heap.pop()?;
        let next = top.t as usize + 1;
        if next >= self.table.row(top.y).len() && !self.table.is_exhausted(top.y) {
            self.table.extend(top.y, self.cloud);
        }
        if let Some(&z) = self.table.row(top.y).get(next) {
            self.heap.heap.push(Reverse(Candidate {
                r: self.cloud.dist_sq(top.y, z),
                y: top.y,
                z,
                t: next as u32,
            }));
        }
        self.emitted += 1;
        Some((top.y, top.z, top.r))
    }

    /// Next edge as a simplex key.
    pub fn next_key(&mut self) -> Option<SimplexKey<T>> {
        self.next_edge().map(|(y, z, r)| SimplexKey::from_parts(&[y, z], r))
    }

    pub fn heap(&self) -> &EdgeHeap<T> {
        &self.heap
    }

    pub fn table(&self) -> &NeighborTable {
        &self.table
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }
}

impl<T: Scalar, const D: usize> Iterator for EdgeStream<'_, T, D> {
    type Item = (PointId, PointId, T);

    fn next(&mut self) -> Option<Self::Item> {
        self.next_edge()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointCloud<f64, 2> {
        PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn sorted_edges<const D: usize>(c: &PointCloud<f64, D>) -> Vec<(u32, u32)> {
        let n = c.len() as u32;
        let mut all: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| (c.dist_sq(a, b), a, b))
            .collect();
        all.sort_by(|x, y| edge_cmp(*x, *y));
        all.into_iter().map(|(_, a, b)| (a, b)).collect()
    }

    #[test]
    fn square_order() {
        let c = square();
        let idx = SpatialIndex::build(&c);
        let s = init_stream(&c, &idx, 3);
        assert_eq!(s.heap().peek().map(|(y, z, _)| (y, z)), Some((0, 1)));
        let got: Vec<_> = s.map(|(y, z, _)| (y, z)).collect();
        assert_eq!(got, vec![(0, 1), (0, 3), (1, 2), (2, 3), (0, 2), (1, 3)]);
    }

    #[test]
    fn two_points() {
        let c = PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let idx = SpatialIndex::build(&c);
        let mut s = init_stream(&c, &idx, 1);
        assert_eq!(s.heap().len(), 1);
        assert_eq!(s.next_edge(), Some((0, 1, 1.0)));
        assert_eq!(s.next_edge(), None);
    }

    #[test]
    fn every_k_gives_the_sorted_list() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in [3usize, 6, 17, 40] {
            let c = PointCloud::new((0..n).map(|_| [next(), next(), next()]).collect()).unwrap();
            let idx = SpatialIndex::build(&c);
            let want = sorted_edges(&c);
            for k in [1, default_k(n), n] {
                let s = init_stream(&c, &idx, k);
                let got: Vec<_> = s.map(|(y, z, _)| (y, z)).collect();
                assert_eq!(got, want, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn ties_follow_labels() {
        // Integer grid: many equal lengths.
        let c = PointCloud::new((0..5).flat_map(|i| (0..5).map(move |j| [i as f64, j as f64])).collect()).unwrap();
        let idx = SpatialIndex::build(&c);
        let got: Vec<_> = init_stream(&c, &idx, 2).map(|(y, z, _)| (y, z)).collect();
        assert_eq!(got, sorted_edges(&c));
    }

    #[test]
    fn extension_is_recorded() {
        let c = square();
        let idx = SpatialIndex::build(&c);
        let mut s = init_stream(&c, &idx, 1);
        assert!(!s.table().is_exhausted(0));
        while s.next_edge().is_some() {}
        assert!(s.table().is_exhausted(0));
        assert!(s.table().extensions() >= 1);
        assert_eq!(s.emitted(), 6);
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(1), 1);
        assert_eq!(default_k(1000), 31);
        assert_eq!(default_k(10_000), 100);
    }
}
