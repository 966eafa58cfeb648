use std::cmp::Ordering;
use std::collections::BTreeMap;

use proptest::prelude::*;
use reduced_rips::avl::AvlTree;
use reduced_rips::datagen::{generate, Family, GeneratorSpec};
use reduced_rips::graphs::{delaunay_edges, gabriel_edges, mst_edges, rng_edges, total_bars};
use reduced_rips::oracle::{brute_force_reduced_ph1, brute_force_vr_ph1};
use reduced_rips::spatial::SpatialIndex;
use reduced_rips::stream::init_stream;
use reduced_rips::{compute_ph1, Params, PointCloud, PointCloud2, PointCloud3, Selection, SimplexKey};

fn dedup<const D: usize>(mut pts: Vec<[f64; D]>) -> Vec<[f64; D]> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn grid_cloud2() -> impl Strategy<Value = PointCloud2> {
    prop::collection::vec((0i32..6, 0i32..6), 3..24)
        .prop_map(|v| dedup(v.into_iter().map(|(x, y)| [x as f64, y as f64]).collect()))
        .prop_filter("need 3 points", |v| v.len() >= 3)
        .prop_map(|v| PointCloud::new(v).unwrap())
}

fn grid_cloud3() -> impl Strategy<Value = PointCloud3> {
    prop::collection::vec((0i32..4, 0i32..4, 0i32..4), 3..22)
        .prop_map(|v| dedup(v.into_iter().map(|(x, y, z)| [x as f64, y as f64, z as f64]).collect()))
        .prop_filter("need 3 points", |v| v.len() >= 3)
        .prop_map(|v| PointCloud::new(v).unwrap())
}

fn float_cloud3() -> impl Strategy<Value = PointCloud3> {
    prop::collection::vec(prop::array::uniform3(-5.0f64..5.0), 4..40).prop_map(|v| PointCloud::new(dedup(v)).unwrap())
}

fn same_as_oracle<const D: usize>(c: &PointCloud<f64, D>) -> Result<(), TestCaseError> {
    let want = brute_force_vr_ph1(c).unwrap().sorted_pairs();
    for selection in [Selection::MinLabel, Selection::MaxLabel] {
        let params = Params {
            selection,
            ..Params::default()
        };
        let out = compute_ph1(c, &params).unwrap();
        prop_assert_eq!(&out.barcode.sorted_pairs(), &want);
        prop_assert_eq!(out.stats.death_count, out.stats.total_bars);
        prop_assert_eq!(
            &brute_force_reduced_ph1(c, selection).unwrap().barcode.sorted_pairs(),
            &want
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tied_distances_in_the_plane(c in grid_cloud2()) {
        same_as_oracle(&c)?;
    }

    #[test]
    fn tied_distances_in_space(c in grid_cloud3()) {
        same_as_oracle(&c)?;
    }

    #[test]
    fn generic_distances_in_space(c in float_cloud3()) {
        same_as_oracle(&c)?;
    }

    #[test]
    fn total_order_is_strict_and_transitive(c in grid_cloud2(), picks in prop::collection::vec(prop::collection::vec(0usize..64, 1..4), 3..30)) {
        let n = c.len();
        let keys: Vec<SimplexKey<f64>> = picks
            .into_iter()
            .map(|p| {
                let mut ids: Vec<u32> = p.into_iter().map(|i| (i % n) as u32).collect();
                ids.sort_unstable();
                ids.dedup();
                SimplexKey::new(&ids, &c)
            })
            .collect();
        for a in &keys {
            prop_assert_eq!(a.total_cmp(a), Ordering::Equal);
            for b in &keys {
                prop_assert_eq!(a.total_cmp(b), b.total_cmp(a).reverse());
                if a.total_cmp(b) == Ordering::Equal {
                    prop_assert_eq!(a.vertices(), b.vertices());
                }
                for d in &keys {
                    if a.total_cmp(b).is_lt() && b.total_cmp(d).is_lt() {
                        prop_assert!(a.total_cmp(d).is_lt());
                    }
                }
            }
        }
    }

    #[test]
    fn stream_is_the_sorted_edge_list(c in grid_cloud3(), k in 1usize..30) {
        let idx = SpatialIndex::build(&c);
        let got: Vec<_> = init_stream(&c, &idx, k).map(|(y, z, _)| (y, z)).collect();
        let n = c.len() as u32;
        let mut want: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        want.sort_by(|&(a, b), &(x, y)| SimplexKey::edge(a, b, &c).total_cmp(&SimplexKey::edge(x, y, &c)));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn graph_chain_holds_with_ties(c in grid_cloud2()) {
        let idx = SpatialIndex::build(&c);
        let rng = rng_edges(&c, &idx);
        let mst = mst_edges(&c, &rng);
        prop_assert!(mst.is_subset_of(&rng));
        prop_assert!(rng.is_subset_of(&gabriel_edges(&c, &idx)));
        prop_assert!(gabriel_edges(&c, &idx).is_subset_of(&delaunay_edges(&c).edges));
        prop_assert_eq!(mst.len(), c.len() - 1);
        prop_assert!(total_bars(rng.len(), c.len()) <= rng.len());
    }

    #[test]
    fn avl_matches_btreemap(keys in prop::collection::vec(0u32..500, 0..300)) {
        let mut tree = AvlTree::new();
        let mut model = BTreeMap::new();
        for (i, k) in keys.into_iter().enumerate() {
            let fresh = !model.contains_key(&k);
            prop_assert_eq!(tree.insert(k, i).is_ok(), fresh);
            model.entry(k).or_insert(i);
        }
        prop_assert!(tree.validate().is_ok());
        let got: Vec<_> = tree.iter().map(|(k, v)| (k, *v)).collect();
        let want: Vec<_> = model.into_iter().collect();
        prop_assert_eq!(got, want);
    }
}

/// Large lunes go through the grid and Delaunay component paths; the
/// exhaustive pairwise path must give the same barcode.
#[test]
fn component_paths_agree_on_medium_clouds() {
    for (family, n) in [(Family::Annulus, 600), (Family::UniformSquare, 800)] {
        let c: PointCloud2 = generate(&GeneratorSpec::new(family, n, 5)).unwrap();
        let fast = compute_ph1(&c, &Params::default()).unwrap();
        let slow = compute_ph1(
            &c,
            &Params {
                small_lune: usize::MAX,
                ..Params::default()
            },
        )
        .unwrap();
        let max = compute_ph1(
            &c,
            &Params {
                selection: Selection::MaxLabel,
                ..Params::default()
            },
        )
        .unwrap();
        assert_eq!(fast.barcode.sorted_pairs(), slow.barcode.sorted_pairs(), "{family}");
        assert_eq!(fast.barcode.sorted_pairs(), max.barcode.sorted_pairs(), "{family}");
        assert!(fast.stats.component_lunes > 0);
    }
    for family in [Family::SolidTorus, Family::UniformCube] {
        let c: PointCloud3 = generate(&GeneratorSpec::new(family, 600, 5)).unwrap();
        let fast = compute_ph1(&c, &Params::default()).unwrap();
        let slow = compute_ph1(
            &c,
            &Params {
                small_lune: usize::MAX,
                ..Params::default()
            },
        )
        .unwrap();
        assert_eq!(fast.barcode.sorted_pairs(), slow.barcode.sorted_pairs(), "{family}");
    }
}

#[test]
fn single_precision_clouds() {
    let c64: PointCloud3 = generate(&GeneratorSpec::new(Family::SolidTorus, 40, 2)).unwrap();
    let c32 = PointCloud::<f32, 3>::new(c64.points().iter().map(|p| p.map(|x| x as f32)).collect()).unwrap();
    let got = compute_ph1(&c32, &Params::default()).unwrap();
    let want = brute_force_vr_ph1(&c32).unwrap();
    assert_eq!(got.barcode.sorted_pairs(), want.sorted_pairs());
    assert!(!got.barcode.is_empty());
}
