//! Simplex keys and the length-lexicographic total order that turns the
//! Vietoris-Rips filtration into a simplex-wise filtration.
//!
//! Simplices are compared by squared diameter, then by dimension, then
//! lexicographically on their sorted vertex labels. Diameters are compared
//! as squared distances; two diameters are equal exactly when their `T`
//! values are equal.

use std::cmp::Ordering;

use crate::cloud::{label, PointCloud, PointId};
use crate::scalar::Scalar;

/// A vertex, edge or triangle with its cached squared diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexKey<T> {
    vertices: [PointId; 3],
    len: u8,
    diameter_sq: T,
}

impl<T: Scalar> SimplexKey<T> {
    /// Builds the key for the simplex spanned by `ids`, which must be
    /// 1 to 3 distinct points of `cloud`.
    pub fn new<const D: usize>(ids: &[PointId], cloud: &PointCloud<T, D>) -> Self {
        assert!((1..=3).contains(&ids.len()), "simplex must have 1 to 3 vertices");
        let mut vertices = [0; 3];
        vertices[..ids.len()].copy_from_slice(ids);
        vertices[..ids.len()].sort_unstable();
        assert!(
            vertices[..ids.len()].windows(2).all(|w| w[0] < w[1]),
            "simplex vertices must be distinct"
        );
        let mut key = Self {
            vertices,
            len: ids.len() as u8,
            diameter_sq: T::zero(),
        };
        key.diameter_sq = simplex_diameter_sq(&key, cloud);
        key
    }

    pub fn vertex(a: PointId) -> Self {
        Self {
            vertices: [a, 0, 0],
            len: 1,
            diameter_sq: T::zero(),
        }
    }

    pub fn edge<const D: usize>(a: PointId, b: PointId, cloud: &PointCloud<T, D>) -> Self {
        Self::new(&[a, b], cloud)
    }

    pub fn triangle<const D: usize>(a: PointId, b: PointId, c: PointId, cloud: &PointCloud<T, D>) -> Self {
        Self::new(&[a, b, c], cloud)
    }

    /// Key from already sorted vertices and a known squared diameter.
    pub(crate) fn from_parts(sorted: &[PointId], diameter_sq: T) -> Self {
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        let mut vertices = [0; 3];
        vertices[..sorted.len()].copy_from_slice(sorted);
        Self {
            vertices,
            len: sorted.len() as u8,
            diameter_sq,
        }
    }

    /// Sorted vertex ids.
    #[inline]
    pub fn vertices(&self) -> &[PointId] {
        &self.vertices[..self.len as usize]
    }

    /// Sorted 1-based labels.
    pub fn labels(&self) -> Vec<u32> {
        self.vertices().iter().map(|&v| label(v)).collect()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    #[inline]
    pub fn diameter_sq(&self) -> T {
        self.diameter_sq
    }

    #[inline]
    pub fn diameter(&self) -> T {
        self.diameter_sq.sqrt()
    }

    /// Position in the total order.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        cmp_diameter(self.diameter_sq, other.diameter_sq)
            .then(self.len.cmp(&other.len))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// `a < b` in the simplex-wise filtration order.
#[inline]
pub fn total_order_less<T: Scalar>(a: &SimplexKey<T>, b: &SimplexKey<T>) -> bool {
    a.total_cmp(b) == Ordering::Less
}

/// Squared diameter recomputed from the cloud; 0 for a vertex.
pub fn simplex_diameter_sq<T: Scalar, const D: usize>(s: &SimplexKey<T>, cloud: &PointCloud<T, D>) -> T {
    let v = s.vertices();
    let mut best = T::zero();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = cloud.dist_sq(v[i], v[j]);
            if d > best {
                best = d;
            }
        }
    }
    best
}

#[inline]
pub(crate) fn cmp_diameter<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).expect("distances are finite")
}

/// Order on two edges given as `(squared length, smaller id, larger id)`.
#[inline]
pub(crate) fn edge_cmp<T: Scalar>(a: (T, PointId, PointId), b: (T, PointId, PointId)) -> Ordering {
    cmp_diameter(a.0, b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// `<p q>` precedes the edge `(r2, y, z)` with `y < z`.
#[inline]
pub(crate) fn edge_precedes<T: Scalar>(d2: T, p: PointId, q: PointId, r2: T, y: PointId, z: PointId) -> bool {
    if d2 < r2 {
        return true;
    }
    if d2 > r2 {
        return false;
    }
    let (p, q) = if p < q { (p, q) } else { (q, p) };
    (p, q) < (y, z)
}

/// Position of a simplex in the simplex-wise filtration, starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiltrationIndex(pub u32);
