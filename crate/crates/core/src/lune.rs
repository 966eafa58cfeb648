//! Lunes, lens shortcuts, lune components and the lune function.
//!
//! The lune of an edge `<yz>` is the set of points `x` with both `<yx>` and
//! `<zx>` preceding `<yz>` in the total order. Candidates come from the
//! intersection of the two closed balls of radius `d(y, z)`; membership on
//! the boundary is settled by the order, never by the metric alone.
//!
//! The lune function picks one representative per connected component,
//! where two members are adjacent when the edge between them precedes
//! `<yz>`. A lens witness (a member seeing `y` and `z` at an angle above
//! 150 degrees) proves there is a single component.

use smallvec::{smallvec, SmallVec};

use crate::cloud::{PointCloud, PointId};
use crate::delaunay::Triangulation;
use crate::error::{Error, Result};
use crate::scalar::{dist_sq, Scalar};
use crate::simplex::{edge_precedes, SimplexKey};
use crate::spatial::{ClosedLens, OpenBall, SpatialIndex};
use crate::unionfind::UnionFind;

/// Lunes with at most this many members use the complete graph on the
/// members; larger ones use the Delaunay graph of the members.
pub const SMALL_LUNE: usize = 64;

/// Rule for choosing the representative of a lune component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    MinLabel,
    MaxLabel,
}

impl Selection {
    #[inline]
    fn prefer(self, candidate: PointId, current: PointId) -> bool {
        match self {
            Selection::MinLabel => candidate < current,
            Selection::MaxLabel => candidate > current,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LuneConfig {
    pub selection: Selection,
    pub small_lune: usize,
}

impl Default for LuneConfig {
    fn default() -> Self {
        Self {
            selection: Selection::MinLabel,
            small_lune: SMALL_LUNE,
        }
    }
}

/// Upper bound `4^D` on the number of lune components.
pub const fn component_bound(dim: usize) -> usize {
    4usize.pow(dim as u32)
}

/// Edge under analysis, normalised so that `y < z`.
#[derive(Debug, Clone, Copy)]
pub struct LuneEdge<T> {
    pub y: PointId,
    pub z: PointId,
    pub length_sq: T,
}

impl<T: Scalar> LuneEdge<T> {
    pub fn new<const D: usize>(a: PointId, b: PointId, cloud: &PointCloud<T, D>) -> Self {
        let (y, z) = if a < b { (a, b) } else { (b, a) };
        Self {
            y,
            z,
            length_sq: cloud.dist_sq(y, z),
        }
    }

    pub fn key(&self) -> SimplexKey<T> {
        SimplexKey::from_parts(&[self.y, self.z], self.length_sq)
    }

    /// Whether `x` belongs to the lune of this edge.
    #[inline]
    pub fn admits<const D: usize>(&self, x: PointId, cloud: &PointCloud<T, D>) -> bool {
        x != self.y
            && x != self.z
            && edge_precedes(cloud.dist_sq(self.y, x), self.y, x, self.length_sq, self.y, self.z)
            && edge_precedes(cloud.dist_sq(self.z, x), self.z, x, self.length_sq, self.y, self.z)
    }

    fn region<const D: usize>(&self, cloud: &PointCloud<T, D>) -> ClosedLens<T, D> {
        ClosedLens {
            a: *cloud.point(self.y),
            b: *cloud.point(self.z),
            radius_sq: self.length_sq,
        }
    }
}

/// Members of the lune of `e`, sorted by label.
pub fn compute_lune<T: Scalar, const D: usize>(
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
) -> Vec<PointId> {
    let mut out = Vec::new();
    compute_lune_into(e, cloud, index, &mut out);
    out
}

pub(crate) fn compute_lune_into<T: Scalar, const D: usize>(
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
    out: &mut Vec<PointId>,
) {
    out.clear();
    index.for_each_in_region(&e.region(cloud), |x, _| {
        if e.admits(x, cloud) {
            out.push(x);
        }
    });
    out.sort_unstable();
}

/// Some lune member, if any; stops at the first one found.
pub fn any_lune_member<T: Scalar, const D: usize>(
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
) -> Option<PointId> {
    index.find_in_region(&e.region(cloud), |x, _| e.admits(x, cloud))
}

/// True when `x` is a lune member with `angle(y x z) > 5 pi / 6`.
///
/// The angle condition is `cos < -sqrt(3)/2`, i.e. with `s = c2 - a2 - b2`,
/// `s > 0` and `s^2 > 3 a2 b2`. It is evaluated in `f64` with an absolute
/// margin of `1e-12 c2^2`, well above the rounding error, so a borderline
/// point is never reported as a witness.
pub fn is_lens_witness<T: Scalar, const D: usize>(x: PointId, e: &LuneEdge<T>, cloud: &PointCloud<T, D>) -> bool {
    if !e.admits(x, cloud) {
        return false;
    }
    let px = widen(cloud.point(x));
    let py = widen(cloud.point(e.y));
    let pz = widen(cloud.point(e.z));
    let a2 = dist_sq(&px, &py);
    let b2 = dist_sq(&px, &pz);
    let c2 = dist_sq(&py, &pz);
    let s = c2 - a2 - b2;
    s > 0.0 && s * s - 3.0 * a2 * b2 > 1e-12 * c2 * c2
}

/// Lens witness from the open ball of radius `(2 - sqrt 3) r / 2` about the
/// midpoint of the edge. Every point of that ball sees the edge at more
/// than 150 degrees; the ball is shrunk by a relative `1e-9` and each hit
/// is re-checked with [`is_lens_witness`].
pub fn lens_ball_pretest<T: Scalar, const D: usize>(
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
    selection: Selection,
) -> Option<PointId> {
    let py = cloud.point(e.y);
    let pz = cloud.point(e.z);
    let two = T::one() + T::one();
    let mut center = [T::zero(); D];
    for i in 0..D {
        center[i] = (py[i] + pz[i]) / two;
    }
    let factor = (2.0 - 3f64.sqrt()) / 2.0 * (1.0 - 1e-9);
    let radius_sq = T::from_f64(factor * factor).expect("representable") * e.length_sq;
    let mut best: Option<PointId> = None;
    index.for_each_in_region(&OpenBall { center, radius_sq }, |x, _| {
        let better = best.is_none_or(|b| selection.prefer(x, b));
        if better && is_lens_witness(x, e, cloud) {
            best = Some(x);
        }
    });
    best
}

/// First member, in label order under `selection`, that is a lens witness.
pub fn lens_angle_scan<T: Scalar, const D: usize>(
    members: &[PointId],
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    selection: Selection,
) -> Option<PointId> {
    match selection {
        Selection::MinLabel => members.iter().copied().find(|&x| is_lens_witness(x, e, cloud)),
        Selection::MaxLabel => members.iter().rev().copied().find(|&x| is_lens_witness(x, e, cloud)),
    }
}

/// Connected components of a lune.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuneComponents {
    /// Each component's members sorted by label; components ordered by
    /// their smallest member.
    pub components: Vec<Vec<PointId>>,
    /// One member per component, sorted by label.
    pub representatives: Vec<PointId>,
}

impl LuneComponents {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Components of the graph on `members` whose edges precede `e`.
///
/// Small lunes test every pair. Larger ones only test the edges of the
/// members' Delaunay triangulation: the threshold graph's connectivity is
/// decided by its minimum spanning forest, which the Delaunay graph
/// contains.
pub fn lune_components<T: Scalar, const D: usize>(
    members: &[PointId],
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    config: &LuneConfig,
) -> LuneComponents {
    let m = members.len();
    let mut uf = UnionFind::new(m);
    let adjacent = |i: usize, j: usize| {
        let (p, q) = (members[i], members[j]);
        edge_precedes(cloud.dist_sq(p, q), p, q, e.length_sq, e.y, e.z)
    };
    let large = m > config.small_lune.max(D + 1);
    if large {
        grid_unions(members, e, cloud, &mut uf, adjacent);
        if uf.num_sets() == 1 {
            return group(members, &mut uf, config.selection);
        }
    }
    let delaunay = if large {
        member_delaunay_edges(members, cloud)
    } else {
        None
    };
    match delaunay {
        Some(edges) => {
            for (i, j) in edges {
                if adjacent(i as usize, j as usize) {
                    uf.union(i, j);
                }
            }
        }
        None => {
            for i in 0..m {
                for j in i + 1..m {
                    if uf.num_sets() == 1 {
                        break;
                    }
                    if adjacent(i, j) {
                        uf.union(i as u32, j as u32);
                    }
                }
            }
        }
    }
    group(members, &mut uf, config.selection)
}

/// Joins members through verified adjacencies found cheaply.
///
/// Members are bucketed into grid cells of side just under `r / sqrt D`,
/// so any two points sharing a cell are closer than `r` and adjacent. Cells
/// are then joined through anchor pairs that pass the exact test. Only
/// true adjacencies are merged, so the partition is never coarser than the
/// real one.
fn grid_unions<T: Scalar, const D: usize>(
    members: &[PointId],
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    uf: &mut UnionFind,
    adjacent: impl Fn(usize, usize) -> bool,
) {
    let side = (e.length_sq.to_f64_exact() / D as f64).sqrt() * (1.0 - 1e-6);
    if side.is_nan() || side <= 0.0 {
        return;
    }
    let mut lo = [f64::INFINITY; D];
    for &x in members {
        for (l, c) in lo.iter_mut().zip(cloud.point(x)) {
            *l = l.min(c.to_f64_exact());
        }
    }
    let mut keyed: Vec<([i32; D], u32)> = members
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = cloud.point(x);
            let mut key = [0i32; D];
            for a in 0..D {
                key[a] = ((p[a].to_f64_exact() - lo[a]) / side).floor() as i32;
            }
            (key, i as u32)
        })
        .collect();
    keyed.sort_unstable();
    // Cells as (key, first slot, end slot); members of a cell are joined.
    let mut cells: Vec<([i32; D], usize, usize)> = Vec::new();
    for (slot, &(key, i)) in keyed.iter().enumerate() {
        match cells.last_mut() {
            Some(c) if c.0 == key => {
                uf.union(keyed[c.1].1, i);
                c.2 = slot + 1;
            }
            _ => cells.push((key, slot, slot + 1)),
        }
    }
    // Cells more than two apart on some axis hold no adjacent pair.
    let near = |a: &[i32; D], b: &[i32; D]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 2);
    for full in [false, true] {
        for ci in 0..cells.len() {
            for cj in ci + 1..cells.len() {
                if uf.num_sets() == 1 {
                    return;
                }
                let (a, b) = (&cells[ci], &cells[cj]);
                if !near(&a.0, &b.0) {
                    continue;
                }
                let (ai, bi) = (keyed[a.1].1, keyed[b.1].1);
                if uf.find(ai) == uf.find(bi) {
                    continue;
                }
                let found = if full {
                    keyed[b.1..b.2]
                        .iter()
                        .map(|k| (ai, k.1))
                        .chain(keyed[a.1..a.2].iter().map(|k| (bi, k.1)))
                        .find(|&(p, q)| adjacent(p as usize, q as usize))
                } else {
                    adjacent(ai as usize, bi as usize).then_some((ai, bi))
                };
                if let Some((p, q)) = found {
                    uf.union(p, q);
                }
            }
        }
    }
}

fn member_delaunay_edges<T: Scalar, const D: usize>(
    members: &[PointId],
    cloud: &PointCloud<T, D>,
) -> Option<Vec<(u32, u32)>> {
    let pts: Vec<[f64; 3]> = members
        .iter()
        .map(|&x| {
            let mut out = [0.0; 3];
            for (o, c) in out.iter_mut().zip(cloud.point(x)) {
                *o = c.to_f64_exact();
            }
            out
        })
        .collect();
    match D {
        2 => Triangulation::<3>::new(pts).ok().map(|t| t.edges()),
        3 => Triangulation::<4>::new(pts).ok().map(|t| t.edges()),
        _ => None,
    }
}

fn group(members: &[PointId], uf: &mut UnionFind, selection: Selection) -> LuneComponents {
    let mut root_slot: Vec<u32> = vec![u32::MAX; members.len()];
    let mut components: Vec<Vec<PointId>> = Vec::new();
    for (i, &x) in members.iter().enumerate() {
        let r = uf.find(i as u32) as usize;
        if root_slot[r] == u32::MAX {
            root_slot[r] = components.len() as u32;
            components.push(Vec::new());
        }
        components[root_slot[r] as usize].push(x);
    }
    for c in &mut components {
        c.sort_unstable();
    }
    components.sort_unstable_by_key(|c| c[0]);
    let mut representatives: Vec<PointId> = components
        .iter()
        .map(|c| match selection {
            Selection::MinLabel => c[0],
            Selection::MaxLabel => *c.last().expect("non-empty component"),
        })
        .collect();
    representatives.sort_unstable();
    LuneComponents {
        components,
        representatives,
    }
}

/// How the lune function value of an edge was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LunePath {
    /// Empty lune: the edge belongs to the relative neighbourhood graph.
    Empty,
    LensBall,
    LensScan,
    /// Full component analysis.
    Components,
}

/// Lune function value `L(e)` of one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuneOutcome {
    pub path: LunePath,
    /// Sorted by label; empty iff the lune is empty.
    pub representatives: SmallVec<[PointId; 4]>,
    /// Number of components (0 for an empty lune).
    pub components: usize,
}

/// Reusable buffers for [`analyze_lune`].
#[derive(Debug, Default)]
pub struct LuneScratch {
    members: Vec<PointId>,
}

/// Lune function of `e`: lens ball, then the lune itself, then the lens
/// angle scan, then full component analysis.
pub fn analyze_lune<T: Scalar, const D: usize>(
    e: &LuneEdge<T>,
    cloud: &PointCloud<T, D>,
    index: &SpatialIndex<T, D>,
    config: &LuneConfig,
    scratch: &mut LuneScratch,
) -> Result<LuneOutcome> {
    if let Some(x) = lens_ball_pretest(e, cloud, index, config.selection) {
        return Ok(LuneOutcome {
            path: LunePath::LensBall,
            representatives: smallvec![x],
            components: 1,
        });
    }
    compute_lune_into(e, cloud, index, &mut scratch.members);
    let members = &scratch.members;
    if members.is_empty() {
        return Ok(LuneOutcome {
            path: LunePath::Empty,
            representatives: SmallVec::new(),
            components: 0,
        });
    }
    if let Some(x) = lens_angle_scan(members, e, cloud, config.selection) {
        return Ok(LuneOutcome {
            path: LunePath::LensScan,
            representatives: smallvec![x],
            components: 1,
        });
    }
    let comps = lune_components(members, e, cloud, config);
    if comps.len() > component_bound(D) {
        return Err(Error::Internal(format!(
            "lune of edge ({}, {}) has {} components, above the bound {}",
            e.y + 1,
            e.z + 1,
            comps.len(),
            component_bound(D)
        )));
    }
    Ok(LuneOutcome {
        path: LunePath::Components,
        components: comps.len(),
        representatives: SmallVec::from_vec(comps.representatives),
    })
}

#[inline]
fn widen<T: Scalar, const D: usize>(p: &[T; D]) -> [f64; D] {
    p.map(|c| c.to_f64_exact())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointCloud<f64, 2> {
        PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn square_lunes() {
        let c = square();
        let idx = SpatialIndex::build(&c);
        let diag = LuneEdge::new(0, 2, &c);
        assert_eq!(compute_lune(&diag, &c, &idx), vec![1, 3]);
        let side = LuneEdge::new(0, 1, &c);
        assert!(compute_lune(&side, &c, &idx).is_empty());
        assert!(any_lune_member(&side, &c, &idx).is_none());
        assert!(any_lune_member(&diag, &c, &idx).is_some());
    }

    #[test]
    fn square_diagonal_has_two_components() {
        let c = square();
        let diag = LuneEdge::new(0, 2, &c);
        let comps = lune_components(&[1, 3], &diag, &c, &LuneConfig::default());
        assert_eq!(comps.components, vec![vec![1], vec![3]]);
        assert_eq!(comps.representatives, vec![1, 3]);
        let one = lune_components(&[1], &diag, &c, &LuneConfig::default());
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn equilateral_tie_enters_lune() {
        // Exactly equilateral: all squared sides are 2.
        let c = PointCloud::new(vec![[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]]).unwrap();
        let idx = SpatialIndex::build(&c);
        assert_eq!(c.dist_sq(0, 1), c.dist_sq(1, 2));
        assert_eq!(c.dist_sq(0, 2), c.dist_sq(1, 2));
        let e23 = LuneEdge::new(1, 2, &c);
        assert_eq!(compute_lune(&e23, &c, &idx), vec![0]);
        let e12 = LuneEdge::new(0, 1, &c);
        assert!(compute_lune(&e12, &c, &idx).is_empty());
        assert_eq!(lens_angle_scan(&[0], &e23, &c, Selection::MinLabel), None);
    }

    #[test]
    fn lens_ball() {
        let c = PointCloud::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.1]]).unwrap();
        let idx = SpatialIndex::build(&c);
        let e = LuneEdge::new(0, 1, &c);
        assert_eq!(lens_ball_pretest(&e, &c, &idx, Selection::MinLabel), Some(2));
        let c = PointCloud::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]).unwrap();
        let idx = SpatialIndex::build(&c);
        let e = LuneEdge::new(0, 1, &c);
        assert_eq!(lens_ball_pretest(&e, &c, &idx, Selection::MinLabel), None);
    }

    #[test]
    fn collinear_midpoint_is_a_witness() {
        let c = PointCloud::new(vec![[0.0, 0.0], [3.0, 0.0], [1.0, 0.0]]).unwrap();
        let e = LuneEdge::new(0, 1, &c);
        assert_eq!(lens_angle_scan(&[2], &e, &c, Selection::MinLabel), Some(2));
        assert!(is_lens_witness(2, &e, &c));
    }

    #[test]
    fn selection_rules() {
        let c = PointCloud::new(vec![[0.0, 0.0], [4.0, 0.0], [2.0, 0.05], [2.0, -0.05], [1.0, 0.01]]).unwrap();
        let idx = SpatialIndex::build(&c);
        let e = LuneEdge::new(0, 1, &c);
        assert_eq!(lens_ball_pretest(&e, &c, &idx, Selection::MinLabel), Some(2));
        assert_eq!(lens_ball_pretest(&e, &c, &idx, Selection::MaxLabel), Some(3));
        let members = compute_lune(&e, &c, &idx);
        assert_eq!(members, vec![2, 3, 4]);
        assert_eq!(lens_angle_scan(&members, &e, &c, Selection::MinLabel), Some(2));
        assert_eq!(lens_angle_scan(&members, &e, &c, Selection::MaxLabel), Some(4));
    }

    #[test]
    fn analyze_paths() {
        let c = square();
        let idx = SpatialIndex::build(&c);
        let mut scratch = LuneScratch::default();
        let cfg = LuneConfig::default();
        let out = analyze_lune(&LuneEdge::new(0, 1, &c), &c, &idx, &cfg, &mut scratch).unwrap();
        assert_eq!(out.path, LunePath::Empty);
        let out = analyze_lune(&LuneEdge::new(0, 2, &c), &c, &idx, &cfg, &mut scratch).unwrap();
        assert_eq!(out.path, LunePath::Components);
        assert_eq!(out.representatives.as_slice(), &[1, 3]);
        assert_eq!(out.components, 2);
    }

    fn clustered_lune<const D: usize>(seed: u64) -> (PointCloud<f64, D>, LuneEdge<f64>) {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut pts: Vec<[f64; D]> = vec![[0.0; D], {
            let mut z = [0.0; D];
            z[0] = 1.0;
            z
        }];
        let clusters = 1 + (next() * 5.0) as usize;
        for _ in 0..clusters {
            let mut centre = [0.0; D];
            centre[0] = 0.5;
            for c in centre.iter_mut().skip(1) {
                *c = (next() - 0.5) * 1.6;
            }
            let spread = 0.02 + next() * 0.3;
            for _ in 0..(30 + (next() * 70.0) as usize) {
                let mut p = centre;
                for c in &mut p {
                    *c += (next() - 0.5) * spread;
                }
                pts.push(p);
            }
        }
        let c = PointCloud::new(pts).unwrap();
        let e = LuneEdge::new(0, 1, &c);
        (c, e)
    }

    fn compare_paths<const D: usize>(seed: u64) -> (usize, usize) {
        let (c, e) = clustered_lune::<D>(seed);
        let idx = SpatialIndex::build(&c);
        let fast = LuneConfig::default();
        let exhaustive = LuneConfig {
            small_lune: usize::MAX,
            ..fast
        };
        let members = compute_lune(&e, &c, &idx);
        let a = lune_components(&members, &e, &c, &fast);
        let b = lune_components(&members, &e, &c, &exhaustive);
        assert_eq!(a, b, "seed {seed}");
        (members.len(), a.len())
    }

    #[test]
    fn large_lunes_match_the_complete_graph() {
        let mut split = 0;
        for seed in 0..150 {
            let (m2, c2) = compare_paths::<2>(seed);
            let (m3, c3) = compare_paths::<3>(seed);
            split += usize::from(m2 > SMALL_LUNE && c2 > 1) + usize::from(m3 > SMALL_LUNE && c3 > 1);
        }
        assert!(split >= 10, "only {split} large split lunes exercised");
    }

    #[test]
    fn bounds() {
        assert_eq!(component_bound(2), 16);
        assert_eq!(component_bound(3), 64);
    }
}
