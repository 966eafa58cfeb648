//! Static kd-tree over a point cloud.
//!
//! The tree splits at the median with the axis cycling through the
//! coordinates, and stores a tight bounding box and the largest point id per
//! node. Box distances are accumulated in the same order as point distances,
//! so pruning never drops a point that the exact per-point test would keep.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use smallvec::{smallvec, SmallVec};

use crate::cloud::{PointCloud, PointId};
use crate::scalar::{dist_sq, Scalar};

const LEAF_SIZE: usize = 12;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node<T, const D: usize> {
    lo: [T; D],
    hi: [T; D],
    start: u32,
    end: u32,
    left: u32,
    right: u32,
    max_id: PointId,
}

/// A query region for [`SpatialIndex::for_each_in_region`].
pub trait Region<T, const D: usize> {
    /// False only if no point of the box can lie in the region.
    fn may_intersect(&self, lo: &[T; D], hi: &[T; D]) -> bool;
    fn contains(&self, p: &[T; D]) -> bool;
}

/// Closed ball given by its squared radius.
#[derive(Debug, Clone, Copy)]
pub struct ClosedBall<T, const D: usize> {
    pub center: [T; D],
    pub radius_sq: T,
}

impl<T: Scalar, const D: usize> Region<T, D> for ClosedBall<T, D> {
    #[inline]
    fn may_intersect(&self, lo: &[T; D], hi: &[T; D]) -> bool {
        box_dist_sq(&self.center, lo, hi) <= self.radius_sq
    }

    #[inline]
    fn contains(&self, p: &[T; D]) -> bool {
        dist_sq(&self.center, p) <= self.radius_sq
    }
}

/// Open ball given by its squared radius.
#[derive(Debug, Clone, Copy)]
pub struct OpenBall<T, const D: usize> {
    pub center: [T; D],
    pub radius_sq: T,
}

impl<T: Scalar, const D: usize> Region<T, D> for OpenBall<T, D> {
    #[inline]
    fn may_intersect(&self, lo: &[T; D], hi: &[T; D]) -> bool {
        box_dist_sq(&self.center, lo, hi) < self.radius_sq
    }

    #[inline]
    fn contains(&self, p: &[T; D]) -> bool {
        dist_sq(&self.center, p) < self.radius_sq
    }
}

/// Intersection of two closed balls with a common squared radius.
#[derive(Debug, Clone, Copy)]
pub struct ClosedLens<T, const D: usize> {
    pub a: [T; D],
    pub b: [T; D],
    pub radius_sq: T,
}

impl<T: Scalar, const D: usize> Region<T, D> for ClosedLens<T, D> {
    #[inline]
    fn may_intersect(&self, lo: &[T; D], hi: &[T; D]) -> bool {
        box_dist_sq(&self.a, lo, hi) <= self.radius_sq && box_dist_sq(&self.b, lo, hi) <= self.radius_sq
    }

    #[inline]
    fn contains(&self, p: &[T; D]) -> bool {
        dist_sq(&self.a, p) <= self.radius_sq && dist_sq(&self.b, p) <= self.radius_sq
    }
}

#[inline]
fn box_dist_sq<T: Scalar, const D: usize>(c: &[T; D], lo: &[T; D], hi: &[T; D]) -> T {
    let mut acc = T::zero();
    for i in 0..D {
        let d = if c[i] < lo[i] {
            lo[i] - c[i]
        } else if c[i] > hi[i] {
            c[i] - hi[i]
        } else {
            continue;
        };
        acc = acc + d * d;
    }
    acc
}

/// kd-tree answering radius, region and nearest-neighbour queries.
#[derive(Debug, Clone)]
pub struct SpatialIndex<T, const D: usize> {
    points: Vec<[T; D]>,
    ids: Vec<PointId>,
    nodes: Vec<Node<T, D>>,
}

impl<T: Scalar, const D: usize> SpatialIndex<T, D> {
    pub fn build(cloud: &PointCloud<T, D>) -> Self {
        Self::from_points(cloud.points())
    }

    /// Index over an arbitrary non-empty slice; ids are slice positions.
    pub fn from_points(points: &[[T; D]]) -> Self {
        assert!(!points.is_empty(), "cannot index an empty point set");
        let mut ids: Vec<PointId> = (0..points.len() as PointId).collect();
        let mut nodes = Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1);
        build_node(points, &mut ids, 0, points.len(), 0, &mut nodes);
        let reordered = ids.iter().map(|&i| points[i as usize]).collect();
        Self {
            points: reordered,
            ids,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Calls `f(id, point)` for every indexed point inside `region`, in
    /// unspecified order.
    pub fn for_each_in_region<R, F>(&self, region: &R, mut f: F)
    where
        R: Region<T, D>,
        F: FnMut(PointId, &[T; D]),
    {
        let mut stack: SmallVec<[u32; 64]> = smallvec![0];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !region.may_intersect(&node.lo, &node.hi) {
                continue;
            }
            if node.left == NONE {
                for slot in node.start as usize..node.end as usize {
                    let p = &self.points[slot];
                    if region.contains(p) {
                        f(self.ids[slot], p);
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
    }

    /// Returns the first point (in traversal order) inside `region` that
    /// satisfies `accept`.
    pub fn find_in_region<R, F>(&self, region: &R, mut accept: F) -> Option<PointId>
    where
        R: Region<T, D>,
        F: FnMut(PointId, &[T; D]) -> bool,
    {
        let mut stack: SmallVec<[u32; 64]> = smallvec![0];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !region.may_intersect(&node.lo, &node.hi) {
                continue;
            }
            if node.left == NONE {
                for slot in node.start as usize..node.end as usize {
                    let p = &self.points[slot];
                    if region.contains(p) && accept(self.ids[slot], p) {
                        return Some(self.ids[slot]);
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
        None
    }

    /// Ids of all points `x` with `|x - center| <= r`, compared on squared
    /// values, sorted ascending.
    pub fn radius_search_closed(&self, center: &[T; D], r: T) -> Vec<PointId> {
        self.radius_search_closed_sq(center, r * r)
    }

    pub fn radius_search_closed_sq(&self, center: &[T; D], radius_sq: T) -> Vec<PointId> {
        let mut out = Vec::new();
        self.for_each_in_region(
            &ClosedBall {
                center: *center,
                radius_sq,
            },
            |id, _| out.push(id),
        );
        out.sort_unstable();
        out
    }

    /// Nearest indexed point to `center`; ties go to the smaller id.
    pub fn nearest(&self, center: &[T; D]) -> (PointId, T) {
        let mut best = self.knn_filtered(center, 1, |_| true);
        best.pop().expect("index is non-empty")
    }

    /// Up to `k` nearest neighbours of point `x` among points with a larger
    /// id, as `(id, squared distance)` sorted by distance then id.
    pub fn k_nearest_larger_label(&self, x: PointId, k: usize) -> Vec<(PointId, T)> {
        let slot = self.ids.iter().position(|&i| i == x).expect("point id is indexed");
        let center = self.points[slot];
        self.k_nearest_larger_label_at(&center, x, k)
    }

    /// As [`Self::k_nearest_larger_label`] with the coordinates of `x`
    /// supplied by the caller.
    pub fn k_nearest_larger_label_at(&self, center: &[T; D], x: PointId, k: usize) -> Vec<(PointId, T)> {
        if k == 0 || self.nodes[0].max_id <= x {
            return Vec::new();
        }
        let mut out = self.knn_pruned(center, k, x);
        out.reverse();
        out
    }

    fn knn_filtered<F: Fn(PointId) -> bool>(&self, center: &[T; D], k: usize, keep: F) -> Vec<(PointId, T)> {
        let mut heap: BinaryHeap<Candidate<T>> = BinaryHeap::with_capacity(k + 1);
        self.knn_visit(0, center, k, &mut heap, &|id, _| keep(id));
        into_sorted_desc(heap)
    }

    fn knn_pruned(&self, center: &[T; D], k: usize, x: PointId) -> Vec<(PointId, T)> {
        let mut heap: BinaryHeap<Candidate<T>> = BinaryHeap::with_capacity(k + 1);
        self.knn_visit(0, center, k, &mut heap, &|id, max_id| {
            max_id > x && (id == NONE || id > x)
        });
        into_sorted_desc(heap)
    }

    /// `keep(id, max_id)` is asked with `id == NONE` to prune whole nodes.
    fn knn_visit<F: Fn(PointId, PointId) -> bool>(
        &self,
        ni: u32,
        center: &[T; D],
        k: usize,
        heap: &mut BinaryHeap<Candidate<T>>,
        keep: &F,
    ) {
        let node = &self.nodes[ni as usize];
        if !keep(NONE, node.max_id) {
            return;
        }
        if heap.len() == k {
            let worst = heap.peek().expect("non-empty").dist_sq;
            if box_dist_sq(center, &node.lo, &node.hi) > worst {
                return;
            }
        }
        if node.left == NONE {
            for slot in node.start as usize..node.end as usize {
                let id = self.ids[slot];
                if !keep(id, id) {
                    continue;
                }
                let cand = Candidate {
                    dist_sq: dist_sq(center, &self.points[slot]),
                    id,
                };
                if heap.len() < k {
                    heap.push(cand);
                } else if cand < *heap.peek().expect("non-empty") {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        let (l, r) = (node.left, node.right);
        let dl = box_dist_sq(center, &self.nodes[l as usize].lo, &self.nodes[l as usize].hi);
        let dr = box_dist_sq(center, &self.nodes[r as usize].lo, &self.nodes[r as usize].hi);
        if dl <= dr {
            self.knn_visit(l, center, k, heap, keep);
            self.knn_visit(r, center, k, heap, keep);
        } else {
            self.knn_visit(r, center, k, heap, keep);
            self.knn_visit(l, center, k, heap, keep);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate<T> {
    dist_sq: T,
    id: PointId,
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist_sq
            .partial_cmp(&other.dist_sq)
            .expect("finite distances")
            .then(self.id.cmp(&other.id))
    }
}

fn into_sorted_desc<T: Scalar>(heap: BinaryHeap<Candidate<T>>) -> Vec<(PointId, T)> {
    let mut v = heap.into_sorted_vec();
    v.reverse();
    v.into_iter().map(|c| (c.id, c.dist_sq)).collect()
}

fn build_node<T: Scalar, const D: usize>(
    points: &[[T; D]],
    ids: &mut [PointId],
    start: usize,
    end: usize,
    depth: usize,
    nodes: &mut Vec<Node<T, D>>,
) -> u32 {
    let slice = &ids[start..end];
    let mut lo = points[slice[0] as usize];
    let mut hi = lo;
    let mut max_id = 0;
    for &i in slice {
        let p = &points[i as usize];
        for a in 0..D {
            if p[a] < lo[a] {
                lo[a] = p[a];
            }
            if p[a] > hi[a] {
                hi[a] = p[a];
            }
        }
        max_id = max_id.max(i);
    }
    let me = nodes.len() as u32;
    nodes.push(Node {
        lo,
        hi,
        start: start as u32,
        end: end as u32,
        left: NONE,
        right: NONE,
        max_id,
    });
    if end - start <= LEAF_SIZE {
        return me;
    }
    let axis = depth % D;
    let mid = (end - start) / 2;
    ids[start..end].select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][axis]
            .partial_cmp(&points[b as usize][axis])
            .expect("finite coordinates")
    });
    let left = build_node(points, ids, start, start + mid, depth + 1, nodes);
    let right = build_node(points, ids, start + mid, end, depth + 1, nodes);
    nodes[me as usize].left = left;
    nodes[me as usize].right = right;
    me
}
