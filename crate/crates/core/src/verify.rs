//! Randomised agreement checks between the engine and the oracles.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::cloud::PointCloud;
use crate::datagen::{generate, uniform_noise, Family, GeneratorSpec};
use crate::error::Result;
use crate::graphs::{delaunay_edges, gabriel_edges, mst_edges, rng_edges};
use crate::lune::{
    component_bound, compute_lune, is_lens_witness, lens_angle_scan, lens_ball_pretest, lune_components, LuneConfig,
    LuneEdge, Selection,
};
use crate::oracle::{brute_force_reduced_ph1, brute_force_vr_ph1, count_non_apparent};
use crate::reduction::{compute_ph1, Params};
use crate::scalar::Scalar;
use crate::spatial::SpatialIndex;

/// Where a trial cloud comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Family(Family),
    /// Uniform on the unit square or cube.
    Noise {
        dim: usize,
    },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Family(fam) => write!(f, "{fam}"),
            Source::Noise { dim } => write!(f, "noise{dim}d"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSpec {
    pub index: usize,
    pub source: Source,
    pub n: usize,
    pub seed: u64,
}

/// Trial `index` of a suite: sources cycle through the four families and
/// 2D/3D noise; `n` is uniform on `[n_min, n_max]`.
pub fn trial_spec(index: usize, suite_seed: u64, n_min: usize, n_max: usize) -> TrialSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let source = match index % 6 {
        0 => Source::Family(Family::UniformSquare),
        1 => Source::Family(Family::Annulus),
        2 => Source::Family(Family::UniformCube),
        3 => Source::Family(Family::SolidTorus),
        4 => Source::Noise { dim: 2 },
        _ => Source::Noise { dim: 3 },
    };
    let span = (n_max.max(n_min) - n_min + 1) as u64;
    TrialSpec {
        index,
        source,
        n: n_min + (rng.next_u64() % span) as usize,
        seed: rng.next_u64(),
    }
}

/// The check a failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Engine or reduced oracle differs from the full filtration.
    Barcode,
    /// Max-label representatives change the barcode.
    Selection,
    /// Reduction deaths differ from `|RNG| - (n - 1)`.
    Stopping,
    /// `|RNG| - (n - 1)` differs from the oracle's non-apparent pairs.
    NonApparent,
    ComponentBound,
    LensWitness,
}

/// Outcome of one trial; `failures` is empty when every check held.
#[derive(Debug, Clone)]
pub struct TrialReport {
    pub spec: TrialSpec,
    pub dim: usize,
    pub intervals: usize,
    pub total_bars: usize,
    pub death_count: usize,
    pub non_apparent: usize,
    pub max_components: usize,
    pub lens_witness_edges: usize,
    pub failures: Vec<(Check, String)>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, check: Check) -> bool {
        self.failures.iter().any(|(c, _)| *c == check)
    }
}

pub fn run_trial(spec: &TrialSpec) -> Result<TrialReport> {
    match spec.source {
        Source::Family(fam) if fam.dim() == 2 => {
            check_cloud(spec, &generate::<f64, 2>(&GeneratorSpec::new(fam, spec.n, spec.seed))?)
        }
        Source::Family(fam) => check_cloud(spec, &generate::<f64, 3>(&GeneratorSpec::new(fam, spec.n, spec.seed))?),
        Source::Noise { dim: 2 } => check_cloud(spec, &uniform_noise::<f64, 2>(spec.n, spec.seed)?),
        Source::Noise { .. } => check_cloud(spec, &uniform_noise::<f64, 3>(spec.n, spec.seed)?),
    }
}

/// Runs every check on one cloud: barcodes from the engine (both selection
/// rules), the full filtration and the reduced oracle (both rules); the
/// stopping count against `|RNG| - (n - 1)` and the oracle's non-apparent
/// pairs; the lune component bound and lens witnesses on every edge.
pub fn check_cloud<T: Scalar, const D: usize>(spec: &TrialSpec, cloud: &PointCloud<T, D>) -> Result<TrialReport> {
    let mut failures = Vec::new();
    let engine = compute_ph1(cloud, &Params::default())?;
    let engine_max = compute_ph1(
        cloud,
        &Params {
            selection: Selection::MaxLabel,
            ..Params::default()
        },
    )?;
    let full = brute_force_vr_ph1(cloud)?;
    let reduced_min = brute_force_reduced_ph1(cloud, Selection::MinLabel)?;
    let reduced_max = brute_force_reduced_ph1(cloud, Selection::MaxLabel)?;
    let non_apparent = count_non_apparent(cloud)?;

    let want = full.sorted_pairs();
    for (check, name, got) in [
        (Check::Barcode, "engine", engine.barcode.sorted_pairs()),
        (Check::Selection, "engine/max-label", engine_max.barcode.sorted_pairs()),
        (Check::Barcode, "reduced oracle", reduced_min.barcode.sorted_pairs()),
        (
            Check::Selection,
            "reduced oracle/max-label",
            reduced_max.barcode.sorted_pairs(),
        ),
    ] {
        if got != want {
            failures.push((check, format!("{name} barcode {got:?} != full {want:?}")));
        }
    }
    let s = &engine.stats;
    if s.death_count != s.total_bars {
        failures.push((
            Check::Stopping,
            format!("death_count {} != total_bars {}", s.death_count, s.total_bars),
        ));
    }
    if s.total_bars != non_apparent {
        failures.push((
            Check::NonApparent,
            format!("total_bars {} != non-apparent pairs {non_apparent}", s.total_bars),
        ));
    }
    let bound = component_bound(D);
    let max_components = s
        .max_components
        .max(engine_max.stats.max_components)
        .max(reduced_min.max_components);
    if max_components > bound {
        failures.push((
            Check::ComponentBound,
            format!("{max_components} lune components exceed {bound}"),
        ));
    }
    let lens_witness_edges = check_lunes(cloud, &mut failures);
    Ok(TrialReport {
        spec: *spec,
        dim: D,
        intervals: engine.barcode.len(),
        total_bars: s.total_bars,
        death_count: s.death_count,
        non_apparent,
        max_components,
        lens_witness_edges,
        failures,
    })
}

/// Every edge: component count within the bound, and exactly one
/// component whenever a lens witness exists. Returns the number of edges
/// with a witness.
fn check_lunes<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>, failures: &mut Vec<(Check, String)>) -> usize {
    let index = SpatialIndex::build(cloud);
    let config = LuneConfig::default();
    let n = cloud.len() as u32;
    let mut witnessed = 0;
    for y in 0..n {
        for z in y + 1..n {
            let e = LuneEdge::new(y, z, cloud);
            let members = compute_lune(&e, cloud, &index);
            let comps = lune_components(&members, &e, cloud, &config);
            if comps.len() > component_bound(D) {
                failures.push((
                    Check::ComponentBound,
                    format!("edge ({}, {}) has {} components", y + 1, z + 1, comps.len()),
                ));
            }
            let ball = lens_ball_pretest(&e, cloud, &index, Selection::MinLabel);
            let scan = lens_angle_scan(&members, &e, cloud, Selection::MinLabel);
            if let Some(x) = ball {
                if !members.contains(&x) || !is_lens_witness(x, &e, cloud) {
                    failures.push((
                        Check::LensWitness,
                        format!("ball witness {} of edge ({}, {}) is invalid", x + 1, y + 1, z + 1),
                    ));
                }
            }
            if ball.is_some() && scan.is_none() {
                failures.push((
                    Check::LensWitness,
                    format!("ball witness of edge ({}, {}) missed by the scan", y + 1, z + 1),
                ));
            }
            if scan.is_some() {
                witnessed += 1;
                if comps.len() != 1 {
                    failures.push((
                        Check::LensWitness,
                        format!(
                            "edge ({}, {}) has a lens witness but {} components",
                            y + 1,
                            z + 1,
                            comps.len()
                        ),
                    ));
                }
            }
        }
    }
    witnessed
}

/// Graph chain `MST ⊆ RNG ⊆ Gabriel ⊆ Delaunay`; returns the violations.
pub fn check_graph_chain<T: Scalar, const D: usize>(cloud: &PointCloud<T, D>) -> Vec<String> {
    let index = SpatialIndex::build(cloud);
    let del = delaunay_edges(cloud).edges;
    let gab = gabriel_edges(cloud, &index);
    let rng = rng_edges(cloud, &index);
    let mst = mst_edges(cloud, &rng);
    let mut out = Vec::new();
    if mst.len() != cloud.len().saturating_sub(1) {
        out.push(format!("MST has {} edges for {} points", mst.len(), cloud.len()));
    }
    for (small, big, name) in [
        (&mst, &rng, "MST ⊄ RNG"),
        (&rng, &gab, "RNG ⊄ Gabriel"),
        (&gab, &del, "Gabriel ⊄ Delaunay"),
    ] {
        if !small.is_subset_of(big) {
            out.push(name.to_string());
        }
    }
    out
}
