//! Degree-1 persistence of the reduced Vietoris-Rips filtration.
//!
//! Edges arrive from the stream in the total order. An edge with an empty
//! lune adds no triangle. Otherwise the edge gets one triangle per lune
//! component, `<y z x>` for each representative `x`. The first of those
//! triangles is paired with the edge itself; every further one is reduced
//! against the columns stored so far. The loop stops once the number of
//! reduction deaths reaches `|RNG| - (n - 1)`.

use rustc_hash::FxHashMap;
use smallvec::{smallvec, SmallVec};

use crate::avl::AvlTree;
use crate::barcode::{Barcode, BarcodeInterval, RunStats};
use crate::cloud::{PointCloud, PointId};
use crate::error::{Error, Result};
use crate::graphs::{rng_edges, total_bars};
use crate::lune::{analyze_lune, LuneConfig, LuneEdge, LunePath, LuneScratch, Selection, SMALL_LUNE};
use crate::resource::current_rss_mb;
use crate::scalar::Scalar;
use crate::simplex::SimplexKey;
use crate::spatial::SpatialIndex;
use crate::stream::{default_k, init_stream};

/// Tuning for [`compute_ph1`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    /// Neighbours per row of the edge stream; `None` for `floor(sqrt n)`.
    pub k: Option<usize>,
    pub selection: Selection,
    pub small_lune: usize,
    /// Abort with [`Error::ResourceLimit`] above this resident size.
    pub mem_limit_mb: Option<u64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            k: None,
            selection: Selection::MinLabel,
            small_lune: SMALL_LUNE,
            mem_limit_mb: None,
        }
    }
}

/// Barcode plus run counters.
#[derive(Debug, Clone)]
pub struct Ph1Output<T> {
    pub barcode: Barcode<T>,
    pub stats: RunStats,
}

/// Sorted filtration indices of the nonzero rows of a column.
pub type Column = SmallVec<[u32; 4]>;

/// Result of reducing one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduced {
    /// Column became zero.
    Birth,
    /// Column stored with this lowest row.
    Death { pivot: u32 },
}

/// Filtration indices of the edges seen so far, assigned from 0 in
/// emission order.
#[derive(Debug, Default)]
pub struct EdgeRegistry {
    index: FxHashMap<u64, u32>,
    edges: Vec<(PointId, PointId)>,
}

impl EdgeRegistry {
    #[inline]
    fn key(a: PointId, b: PointId) -> u64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        ((a as u64) << 32) | b as u64
    }

    pub fn register(&mut self, a: PointId, b: PointId) -> u32 {
        let i = self.edges.len() as u32;
        let prev = self.index.insert(Self::key(a, b), i);
        debug_assert!(prev.is_none(), "edge registered twice");
        self.edges.push(if a < b { (a, b) } else { (b, a) });
        i
    }

    pub fn get(&self, a: PointId, b: PointId) -> Option<u32> {
        self.index.get(&Self::key(a, b)).copied()
    }

    pub fn edge(&self, i: u32) -> (PointId, PointId) {
        self.edges[i as usize]
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Mutable state of the main loop.
pub struct Engine<'a, T: Scalar, const D: usize> {
    cloud: &'a PointCloud<T, D>,
    index: &'a SpatialIndex<T, D>,
    config: LuneConfig,
    scratch: LuneScratch,
    pub registry: EdgeRegistry,
    pub tree: AvlTree<Column>,
    pub barcode: Barcode<T>,
    pub stats: RunStats,
    work: Column,
}

impl<'a, T: Scalar, const D: usize> Engine<'a, T, D> {
    pub fn new(cloud: &'a PointCloud<T, D>, index: &'a SpatialIndex<T, D>, config: LuneConfig) -> Self {
        Self {
            cloud,
            index,
            config,
            scratch: LuneScratch::default(),
            registry: EdgeRegistry::default(),
            tree: AvlTree::new(),
            barcode: Barcode::default(),
            stats: RunStats::default(),
            work: Column::new(),
        }
    }

    /// Registers the edge `<y z>` and adds the triangles of its lune
    /// function.
    pub fn process_edge(&mut self, y: PointId, z: PointId, length_sq: T) -> Result<()> {
        let fresh = self.registry.register(y, z);
        self.stats.edges_processed += 1;
        let e = LuneEdge { y, z, length_sq };
        let lune = analyze_lune(&e, self.cloud, self.index, &self.config, &mut self.scratch)?;
        match lune.path {
            LunePath::Empty => {
                self.stats.empty_lunes += 1;
                return Ok(());
            }
            LunePath::LensBall => self.stats.lens_ball_hits += 1,
            LunePath::LensScan => self.stats.lens_scan_hits += 1,
            LunePath::Components => self.stats.component_lunes += 1,
        }
        self.stats.max_components = self.stats.max_components.max(lune.components);
        for (j, &x) in lune.representatives.iter().enumerate() {
            let mut column: Column = smallvec![fresh, self.edge_index(y, x)?, self.edge_index(z, x)?,];
            column.sort_unstable();
            self.stats.triangles_processed += 1;
            let triangle = [y, z, x];
            if j == 0 {
                // Lowest row is the fresh edge, which no stored column uses.
                let inserted = self.tree.insert(fresh, column).is_ok();
                debug_assert!(inserted);
            } else {
                self.reduce_and_pair(column, triangle, length_sq);
            }
        }
        Ok(())
    }

    fn edge_index(&self, a: PointId, b: PointId) -> Result<u32> {
        self.registry
            .get(a, b)
            .ok_or_else(|| Error::Internal(format!("face ({}, {}) was not emitted before its coface", a + 1, b + 1)))
    }

    /// Reduces `column` (the boundary of `triangle`) against the stored
    /// columns and records the resulting pair.
    pub fn reduce_and_pair(&mut self, mut column: Column, triangle: [PointId; 3], death_sq: T) -> Reduced {
        while let Some(&pivot) = column.last() {
            let Some(other) = self.tree.get(pivot) else {
                break;
            };
            symmetric_difference(&column, other, &mut self.work);
            std::mem::swap(&mut column, &mut self.work);
            self.stats.column_additions += 1;
        }
        let Some(&pivot) = column.last() else {
            self.stats.cycles_born += 1;
            return Reduced::Birth;
        };
        self.tree.insert(pivot, column).expect("pivot is free after reduction");
        self.stats.death_count += 1;
        let (a, b) = self.registry.edge(pivot);
        let birth_sq = self.cloud.dist_sq(a, b);
        if birth_sq < death_sq {
            let mut tri = triangle;
            tri.sort_unstable();
            self.barcode.intervals.push(BarcodeInterval {
                birth: birth_sq.sqrt(),
                death: death_sq.sqrt(),
                birth_simplex: SimplexKey::from_parts(&[a, b], birth_sq),
                death_simplex: SimplexKey::from_parts(&tri, death_sq),
            });
        }
        Reduced::Death { pivot }
    }
}

/// Merged symmetric difference of two sorted index lists.
fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Column) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

const MEM_CHECK_EVERY: u64 = 1 << 14;

/// Degree-1 Vietoris-Rips barcode of `cloud`.
pub fn compute_ph1<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, params: &Params) -> Result<Ph1Output<T>> {
    let n = cloud.len();
    let index = SpatialIndex::build(cloud);
    let rng = rng_edges(cloud, &index);
    let target = total_bars(rng.len(), n);
    let k = params
        .k
        .unwrap_or_else(|| default_k(n))
        .clamp(1, n.saturating_sub(1).max(1));
    let config = LuneConfig {
        selection: params.selection,
        small_lune: params.small_lune,
    };
    let mut engine = Engine::new(cloud, &index, config);
    engine.stats.k = k;
    engine.stats.rng_size = rng.len();
    engine.stats.total_bars = target;
    drop(rng);
    check_memory(params.mem_limit_mb)?;
    if target > 0 {
        let mut stream = init_stream(cloud, &index, k);
        check_memory(params.mem_limit_mb)?;
        while engine.stats.death_count < target {
            let Some((y, z, r)) = stream.next_edge() else {
                return Err(Error::Internal(format!(
                    "edge stream exhausted with {} of {} deaths found",
                    engine.stats.death_count, target
                )));
            };
            engine.process_edge(y, z, r)?;
            if engine.stats.edges_processed.is_multiple_of(MEM_CHECK_EVERY) {
                check_memory(params.mem_limit_mb)?;
            }
        }
        engine.stats.row_extensions = stream.table().extensions();
    }
    Ok(Ph1Output {
        barcode: engine.barcode,
        stats: engine.stats,
    })
}

fn check_memory(limit_mb: Option<u64>) -> Result<()> {
    let Some(limit_mb) = limit_mb else {
        return Ok(());
    };
    match current_rss_mb() {
        Some(used_mb) if used_mb > limit_mb => Err(Error::ResourceLimit { used_mb, limit_mb }),
        _ => Ok(()),
    }
}
