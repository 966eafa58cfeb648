//! Proximity graphs on a point cloud: Delaunay, Gabriel, relative
//! neighbourhood graph (RNG) and Euclidean minimum spanning tree.
//!
//! The chain `MST ⊆ RNG ⊆ Gabriel ⊆ Delaunay` holds, so each graph is
//! computed by filtering the edges of the next larger one.

use std::io::Write;

use rayon::prelude::*;

use crate::cloud::{label, PointCloud, PointId};
use crate::delaunay::{Degeneracy, Triangulation};
use crate::error::Result;
use crate::lune::{any_lune_member, LuneEdge};
use crate::scalar::Scalar;
use crate::simplex::edge_cmp;
use crate::spatial::{ClosedBall, SpatialIndex};
use crate::unionfind::UnionFind;

/// Undirected edges `(a, b)` with `a < b`, sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet {
    edges: Vec<(PointId, PointId)>,
}

impl EdgeSet {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (PointId, PointId)>) -> Self {
        let mut edges: Vec<_> = pairs
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Self { edges }
    }

    /// All `n (n - 1) / 2` pairs.
    pub fn complete(n: usize) -> Self {
        let n = n as PointId;
        Self {
            edges: (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn as_slice(&self) -> &[(PointId, PointId)] {
        &self.edges
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, PointId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, a: PointId, b: PointId) -> bool {
        let e = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&e).is_ok()
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.edges.iter().all(|&(a, b)| other.contains(a, b))
    }

    /// Edges sorted by the total order on simplices.
    pub fn sorted_by_filtration<T: Scalar, const D: usize>(&self, cloud: &PointCloud<T, D>) -> Vec<(PointId, PointId)> {
        let mut keyed: Vec<(T, PointId, PointId)> =
            self.edges.iter().map(|&(a, b)| (cloud.dist_sq(a, b), a, b)).collect();
        keyed.sort_unstable_by(|x, y| edge_cmp(*x, *y));
        keyed.into_iter().map(|(_, a, b)| (a, b)).collect()
    }

    /// Writes `a,b,length` rows with 1-based labels.
    pub fn write_csv<T: Scalar, const D: usize, W: Write>(&self, cloud: &PointCloud<T, D>, mut out: W) -> Result<()> {
        writeln!(out, "a,b,length")?;
        for &(a, b) in &self.edges {
            writeln!(out, "{},{},{}", label(a), label(b), cloud.dist_sq(a, b).sqrt())?;
        }
        Ok(())
    }
}

/// Delaunay edges, with the reason a fallback to the complete graph was
/// taken when the cloud is not full-dimensional.
#[derive(Debug, Clone)]
pub struct DelaunayEdges {
    pub edges: EdgeSet,
    pub degeneracy: Option<Degeneracy>,
}

/// Edges of the Delaunay triangulation. Clouds with fewer than `D + 1`
/// points or lying in a lower-dimensional affine subspace get the complete
/// edge set instead, which contains every graph derived from it.
pub fn delaunay_edges<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>) -> DelaunayEdges {
    let pts = cloud.to_f64_padded();
    let result = match D {
        2 => Triangulation::<3>::new(pts).map(|t| t.edges()),
        3 => Triangulation::<4>::new(pts).map(|t| t.edges()),
        _ => unreachable!("point clouds are 2D or 3D"),
    };
    match result {
        Ok(edges) => DelaunayEdges {
            edges: EdgeSet { edges },
            degeneracy: None,
        },
        Err(d) => DelaunayEdges {
            edges: EdgeSet::complete(cloud.len()),
            degeneracy: Some(d),
        },
    }
}

/// True iff no point lies in the lune of `<a b>` under the total order.
pub fn lune_is_empty<T: Scalar, const D: usize>(
    a: PointId,
    b: PointId,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
) -> bool {
    any_lune_member(&LuneEdge::new(a, b, cloud), cloud, index).is_none()
}

/// Relative neighbourhood graph: edges with an empty lune.
pub fn rng_edges<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, index: &SpatialIndex<T, D>) -> EdgeSet {
    rng_from_candidates(&delaunay_edges(cloud).edges, cloud, index)
}

/// RNG edges among `candidates`, which must contain the RNG.
pub fn rng_from_candidates<T: Scalar, const D: usize>(
    candidates: &EdgeSet,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
) -> EdgeSet {
    let edges = candidates
        .edges
        .par_iter()
        .copied()
        .filter(|&(a, b)| lune_is_empty(a, b, cloud, index))
        .collect();
    EdgeSet { edges }
}

/// Gabriel graph: edges whose closed diametral ball holds no other point,
/// i.e. no `x` with `(x - a) . (x - b) <= 0`.
pub fn gabriel_edges<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, index: &SpatialIndex<T, D>) -> EdgeSet {
    let candidates = delaunay_edges(cloud).edges;
    let two = T::one() + T::one();
    let edges = candidates
        .edges
        .par_iter()
        .copied()
        .filter(|&(a, b)| {
            let (pa, pb) = (cloud.point(a), cloud.point(b));
            let mut center = [T::zero(); D];
            for i in 0..D {
                center[i] = (pa[i] + pb[i]) / two;
            }
            // Padded radius; the dot product decides.
            let radius_sq = cloud.dist_sq(a, b) / (two + two) * T::from_f64(1.0 + 1e-6).unwrap();
            index
                .find_in_region(&ClosedBall { center, radius_sq }, |x, px| {
                    if x == a || x == b {
                        return false;
                    }
                    let mut dot = T::zero();
                    for i in 0..D {
                        dot = dot + (px[i] - pa[i]) * (px[i] - pb[i]);
                    }
                    dot <= T::zero()
                })
                .is_none()
        })
        .collect();
    EdgeSet { edges }
}

/// Minimum spanning tree by Kruskal over the RNG, scanning edges in the
/// total order. Unique because the total order is strict.
pub fn mst_edges<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, rng: &EdgeSet) -> EdgeSet {
    let mut uf = UnionFind::new(cloud.len());
    let tree = rng
        .sorted_by_filtration(cloud)
        .into_iter()
        .filter(|&(a, b)| uf.union(a, b));
    EdgeSet::from_pairs(tree)
}

/// Edges of a spanning tree on `n` points.
pub fn mst_edge_count(n: usize) -> usize {
    n.saturating_sub(1)
}

/// Number of finite PH1 bars in the reduced filtration, `|RNG| - (n - 1)`.
pub fn total_bars(rng_size: usize, n: usize) -> usize {
    rng_size - mst_edge_count(n)
}
