//! Brute-force reference computations for small clouds.
//!
//! Everything here is written from scratch against the definitions, without
//! the lazy engine's order helpers, lune code or search structures, so that
//! agreement between the two is meaningful. Only the squared-distance
//! arithmetic is the same (coordinate-wise accumulation from index 0), which
//! makes endpoints comparable with exact float equality.

use std::cmp::Ordering;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rustc_hash::FxHashMap;

use crate::barcode::{Barcode, BarcodeInterval};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::lune::Selection;
use crate::scalar::Scalar;
use crate::simplex::SimplexKey;

/// Default largest cloud the oracle accepts.
pub const ORACLE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSimplex<T> {
    /// Sorted 0-based ids.
    pub vertices: Vec<u32>,
    pub diameter_sq: T,
}

impl<T: Scalar> OracleSimplex<T> {
    fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    fn key(&self) -> SimplexKey<T> {
        SimplexKey::from_parts(&self.vertices, self.diameter_sq)
    }
}

fn sq_dist<T: Scalar, const D: usize>(p: &[T; D], q: &[T; D]) -> T {
    let mut s = T::zero();
    for i in 0..D {
        let d = p[i] - q[i];
        s = s + d * d;
    }
    s
}

fn diam_sq<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, vs: &[u32]) -> T {
    let mut m = T::zero();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            let d = sq_dist(cloud.point(a), cloud.point(b));
            if d > m {
                m = d;
            }
        }
    }
    m
}

fn order<T: Scalar>(a: &OracleSimplex<T>, b: &OracleSimplex<T>) -> Ordering {
    match a.diameter_sq.partial_cmp(&b.diameter_sq).expect("finite") {
        Ordering::Equal => a
            .vertices
            .len()
            .cmp(&b.vertices.len())
            .then_with(|| a.vertices.cmp(&b.vertices)),
        o => o,
    }
}

/// All simplices up to a dimension, in the total order.
#[derive(Debug, Clone)]
pub struct FullFiltration<T> {
    pub simplices: Vec<OracleSimplex<T>>,
}

impl<T: Scalar> FullFiltration<T> {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }

    fn positions(&self) -> FxHashMap<Vec<u32>, usize> {
        self.simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.clone(), i))
            .collect()
    }

    /// Boundary of simplex `i` as sorted filtration positions.
    fn boundary(&self, i: usize, pos: &FxHashMap<Vec<u32>, usize>) -> Vec<usize> {
        let v = &self.simplices[i].vertices;
        if v.len() == 1 {
            return Vec::new();
        }
        let mut out: Vec<usize> = (0..v.len())
            .map(|skip| {
                let face: Vec<u32> = v
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &x)| x)
                    .collect();
                pos[&face]
            })
            .collect();
        out.sort_unstable();
        out
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// Every simplex of dimension at most `max_dim` (2 or 3), sorted.
pub fn enumerate_filtration<T: Scalar, const D: usize>(
    cloud: &PointCloud<T, D>,
    max_dim: usize,
    cap: usize,
) -> Result<FullFiltration<T>> {
    check_cap(cloud.len(), cap)?;
    assert!((1..=3).contains(&max_dim), "max_dim must be 1, 2 or 3");
    let n = cloud.len() as u32;
    let mut simplices = Vec::new();
    let mut push = |vs: Vec<u32>| {
        let d = diam_sq(cloud, &vs);
        simplices.push(OracleSimplex {
            vertices: vs,
            diameter_sq: d,
        });
    };
    for a in 0..n {
        push(vec![a]);
        for b in a + 1..n {
            push(vec![a, b]);
            if max_dim < 2 {
                continue;
            }
            for c in b + 1..n {
                push(vec![a, b, c]);
                if max_dim < 3 {
                    continue;
                }
                for d in c + 1..n {
                    push(vec![a, b, c, d]);
                }
            }
        }
    }
    simplices.sort_by(order);
    Ok(FullFiltration { simplices })
}

/// A degree-1 persistence pair as filtration positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub edge: usize,
    pub triangle: usize,
}

/// Standard column reduction restricted to the triangle columns.
fn reduce_triangles<T: Scalar>(f: &FullFiltration<T>) -> Vec<Pair> {
    let pos = f.positions();
    let mut low_owner: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    let mut pairs = Vec::new();
    for j in 0..f.len() {
        if f.simplices[j].dim() != 2 {
            continue;
        }
        let mut col = f.boundary(j, &pos);
        while let Some(&low) = col.last() {
            match low_owner.get(&low) {
                Some(other) => col = xor(&col, other),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pairs.push(Pair { edge: low, triangle: j });
            low_owner.insert(low, col);
        }
    }
    pairs
}

fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a
        .iter()
        .filter(|x| !b.contains(x))
        .chain(b.iter().filter(|x| !a.contains(x)))
        .copied()
        .collect();
    out.sort_unstable();
    out
}

fn pairs_to_barcode<T: Scalar>(f: &FullFiltration<T>, pairs: &[Pair]) -> Barcode<T> {
    let intervals = pairs
        .iter()
        .filter_map(|p| {
            let (e, t) = (&f.simplices[p.edge], &f.simplices[p.triangle]);
            (e.diameter_sq < t.diameter_sq).then(|| BarcodeInterval {
                birth: e.diameter_sq.sqrt(),
                death: t.diameter_sq.sqrt(),
                birth_simplex: e.key(),
                death_simplex: t.key(),
            })
        })
        .collect();
    Barcode { intervals }
}

/// Degree-1 barcode from the full Vietoris-Rips filtration.
pub fn brute_force_vr_ph1<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>) -> Result<Barcode<T>> {
    let f = enumerate_filtration(cloud, 2, ORACLE_CAP)?;
    Ok(pairs_to_barcode(&f, &reduce_triangles(&f)))
}

/// Degree-1 pairs of the full filtration with their apparent-pair flag.
#[derive(Debug, Clone)]
pub struct PairClassification {
    pub pairs: Vec<(Pair, bool)>,
}

impl PairClassification {
    pub fn apparent(&self) -> usize {
        self.pairs.iter().filter(|(_, a)| *a).count()
    }

    pub fn non_apparent(&self) -> usize {
        self.pairs.len() - self.apparent()
    }
}

/// Tags every degree-1 pair: apparent when the triangle is the edge's
/// earliest coface and the edge is the triangle's latest face.
pub fn classify_apparent_pairs<T: Scalar>(f: &FullFiltration<T>) -> PairClassification {
    let pos = f.positions();
    let mut first_coface: FxHashMap<usize, usize> = FxHashMap::default();
    for j in 0..f.len() {
        if f.simplices[j].dim() == 2 {
            for e in f.boundary(j, &pos) {
                first_coface.entry(e).or_insert(j);
            }
        }
    }
    let pairs = reduce_triangles(f)
        .into_iter()
        .map(|p| {
            let last_face = *f.boundary(p.triangle, &pos).last().expect("triangle has faces");
            let apparent = first_coface.get(&p.edge) == Some(&p.triangle) && last_face == p.edge;
            (p, apparent)
        })
        .collect();
    PairClassification { pairs }
}

/// Number of non-apparent degree-1 pairs of the full filtration.
pub fn count_non_apparent<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>) -> Result<usize> {
    let f = enumerate_filtration(cloud, 2, ORACLE_CAP)?;
    Ok(classify_apparent_pairs(&f).non_apparent())
}

/// Output of the brute-force reduced pipeline.
#[derive(Debug, Clone)]
pub struct ReducedOracle<T> {
    pub barcode: Barcode<T>,
    /// Number of 2-simplices in the reduced complex.
    pub triangles: usize,
    /// Largest number of lune components over all edges.
    pub max_components: usize,
}

/// Builds the whole reduced complex (every edge, its lune, components and
/// representatives) and reduces it with the standard algorithm.
pub fn brute_force_reduced_ph1<T: Scalar, const D: usize>(
    cloud: &PointCloud<T, D>,
    selection: Selection,
) -> Result<ReducedOracle<T>> {
    check_cap(cloud.len(), ORACLE_CAP)?;
    let n = cloud.len() as u32;
    let edge = |a: u32, b: u32| {
        let (a, b) = (a.min(b), a.max(b));
        OracleSimplex {
            vertices: vec![a, b],
            diameter_sq: sq_dist(cloud.point(a), cloud.point(b)),
        }
    };
    let before = |a: &OracleSimplex<T>, b: &OracleSimplex<T>| order(a, b) == Ordering::Less;
    let mut simplices: Vec<OracleSimplex<T>> = Vec::new();
    let mut max_components = 0;
    for y in 0..n {
        simplices.push(OracleSimplex {
            vertices: vec![y],
            diameter_sq: T::zero(),
        });
        for z in y + 1..n {
            let yz = edge(y, z);
            let lune: Vec<u32> = (0..n)
                .filter(|&x| x != y && x != z && before(&edge(y, x), &yz) && before(&edge(z, x), &yz))
                .collect();
            // Components by depth-first search on the threshold graph.
            let mut comp = vec![usize::MAX; lune.len()];
            let mut reps = Vec::new();
            for s in 0..lune.len() {
                if comp[s] != usize::MAX {
                    continue;
                }
                let id = reps.len();
                comp[s] = id;
                let mut stack = vec![s];
                let mut pick = lune[s];
                while let Some(u) = stack.pop() {
                    pick = match selection {
                        Selection::MinLabel => pick.min(lune[u]),
                        Selection::MaxLabel => pick.max(lune[u]),
                    };
                    for v in 0..lune.len() {
                        if comp[v] == usize::MAX && before(&edge(lune[u], lune[v]), &yz) {
                            comp[v] = id;
                            stack.push(v);
                        }
                    }
                }
                reps.push(pick);
            }
            max_components = max_components.max(reps.len());
            for x in reps {
                let mut vs = vec![y, z, x];
                vs.sort_unstable();
                simplices.push(OracleSimplex {
                    vertices: vs,
                    diameter_sq: yz.diameter_sq,
                });
            }
            simplices.push(yz);
        }
    }
    simplices.sort_by(order);
    let f = FullFiltration { simplices };
    let triangles = f.count_dim(2);
    Ok(ReducedOracle {
        barcode: pairs_to_barcode(&f, &reduce_triangles(&f)),
        triangles,
        max_components,
    })
}

/// Checks `boundary(boundary(c)) = 0` over Z/2 for `trials` random chains
/// of triangles and, when present, tetrahedra.
pub fn boundary_of_boundary_vanishes<T: Scalar>(f: &FullFiltration<T>, trials: usize, seed: u64) -> bool {
    let pos = f.positions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for dim in [2usize, 3] {
        let cells: Vec<usize> = (0..f.len()).filter(|&i| f.simplices[i].dim() == dim).collect();
        if cells.is_empty() {
            continue;
        }
        for _ in 0..trials {
            let mut parity: FxHashMap<usize, bool> = FxHashMap::default();
            for &c in &cells {
                if rng.next_u32() % 2 == 0 {
                    continue;
                }
                for face in f.boundary(c, &pos) {
                    for ridge in f.boundary(face, &pos) {
                        *parity.entry(ridge).or_default() ^= true;
                    }
                }
            }
            if parity.values().any(|&odd| odd) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointCloud<f64, 2> {
        PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn three_points() {
        let c = PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]).unwrap();
        let f = enumerate_filtration(&c, 2, ORACLE_CAP).unwrap();
        assert_eq!(f.len(), 7);
        assert_eq!(f.simplices.last().unwrap().vertices, vec![0, 1, 2]);
    }

    #[test]
    fn square_filtration() {
        let f = enumerate_filtration(&square(), 2, ORACLE_CAP).unwrap();
        assert_eq!(f.len(), 14);
        let tail: Vec<_> = f.simplices[8..].iter().map(|s| s.vertices.clone()).collect();
        assert_eq!(tail[0], vec![0, 2]);
        assert_eq!(tail[1], vec![1, 3]);
        assert!(f.simplices[10..].iter().all(|s| s.dim() == 2 && s.diameter_sq == 2.0));
    }

    #[test]
    fn faces_precede_cofaces() {
        let pts: Vec<[f64; 2]> = (0..10)
            .map(|i| [(i * 7 % 10) as f64 * 0.31, (i * 3 % 10) as f64 * 0.17 + i as f64 * 0.01])
            .collect();
        let c = PointCloud::new(pts).unwrap();
        let f = enumerate_filtration(&c, 3, ORACLE_CAP).unwrap();
        let pos = f.positions();
        for i in 0..f.len() {
            for face in f.boundary(i, &pos) {
                assert!(face < i);
            }
        }
        assert!(boundary_of_boundary_vanishes(&f, 20, 1));
    }

    #[test]
    fn square_barcodes() {
        let c = square();
        let want = vec![(1.0, 2f64.sqrt())];
        assert_eq!(brute_force_vr_ph1(&c).unwrap().sorted_pairs(), want);
        for sel in [Selection::MinLabel, Selection::MaxLabel] {
            let r = brute_force_reduced_ph1(&c, sel).unwrap();
            assert_eq!(r.barcode.sorted_pairs(), want);
            assert_eq!(r.triangles, 3);
            assert_eq!(r.max_components, 2);
        }
        assert_eq!(count_non_apparent(&c).unwrap(), 1);
    }

    #[test]
    fn circle_has_one_bar() {
        let pts: Vec<[f64; 2]> = (0..12)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 12.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let c = PointCloud::new(pts).unwrap();
        assert_eq!(brute_force_vr_ph1(&c).unwrap().len(), 1);
    }

    #[test]
    fn degenerate_inputs() {
        let line = PointCloud::new((0..5).map(|i| [i as f64, 0.0]).collect()).unwrap();
        assert!(brute_force_vr_ph1(&line).unwrap().is_empty());
        let two = PointCloud::new(vec![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let f = enumerate_filtration(&two, 2, ORACLE_CAP).unwrap();
        assert!(classify_apparent_pairs(&f).pairs.is_empty());
    }

    #[test]
    fn cap() {
        let big = PointCloud::new((0..65).map(|i| [i as f64, (i * i) as f64]).collect()).unwrap();
        assert!(matches!(
            brute_force_vr_ph1(&big),
            Err(Error::CapExceeded { n: 65, cap: 64 })
        ));
    }
}
