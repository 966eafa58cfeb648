//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;

use reduced_rips::bench::{bench_one, k_schedule, loglog_slope, BenchRecord};
use reduced_rips::datagen::{generate, uniform_noise, Family, GeneratorSpec};
use reduced_rips::lune::component_bound;
use reduced_rips::resource::peak_rss_mb;
use reduced_rips::spatial::SpatialIndex;
use reduced_rips::stream::{default_k, init_stream};
use reduced_rips::verify::{check_graph_chain, run_trial, trial_spec, Check, TrialReport};
use reduced_rips::{compute_ph1, Params, PointCloud, PointCloud2, Scalar, SimplexKey};

const SUITE_SEED: u64 = 0x5EED_0001;
const TRIALS: usize = 200;
const MEM_CEILING_MB: u64 = 8 * 1024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, o: &Outcome) {
    println!(
        "criterion {id} ({name}): {} {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn count_failed(reports: &[TrialReport], checks: &[Check]) -> (usize, Vec<String>) {
    let mut bad = 0;
    let mut notes = Vec::new();
    for r in reports {
        let hits: Vec<_> = r.failures.iter().filter(|(c, _)| checks.contains(c)).collect();
        if !hits.is_empty() {
            bad += 1;
            if notes.len() < 3 {
                notes.push(format!(
                    "trial {} ({} n={}): {}",
                    r.spec.index, r.spec.source, r.spec.n, hits[0].1
                ));
            }
        }
    }
    (bad, notes)
}

fn trial_outcome(reports: &[TrialReport], checks: &[Check], what: &str) -> Outcome {
    let (bad, notes) = count_failed(reports, checks);
    let mut detail = format!("{} of {} clouds {what}", reports.len() - bad, reports.len());
    for n in notes {
        detail.push_str(&format!("; {n}"));
    }
    Outcome {
        pass: bad == 0 && !reports.is_empty(),
        detail,
    }
}

fn graph_chain() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..100u64 {
        let n = 3 + (i as usize * 37) % 198;
        let violations = match i % 4 {
            0 => check_graph_chain(&uniform_noise::<f64, 2>(n, i).unwrap()),
            1 => check_graph_chain(&generate::<f64, 2>(&GeneratorSpec::new(Family::Annulus, n, i)).unwrap()),
            2 => check_graph_chain(&uniform_noise::<f64, 3>(n, i).unwrap()),
            _ => check_graph_chain(&generate::<f64, 3>(&GeneratorSpec::new(Family::SolidTorus, n, i)).unwrap()),
        };
        if !violations.is_empty() {
            bad.push(format!("cloud {i} n={n}: {}", violations.join(", ")));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} of 100 clouds (2D and 3D, n <= 200) satisfy MST ⊆ RNG ⊆ Gabriel ⊆ Delaunay{}",
            100 - bad.len(),
            first(&bad)
        ),
    }
}

fn first(v: &[String]) -> String {
    v.first().map(|s| format!("; {s}")).unwrap_or_default()
}

fn unit_square() -> Outcome {
    let c: PointCloud2 = PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let out = compute_ph1(&c, &Params::default()).unwrap();
    let bars = &out.barcode.intervals;
    let pass = bars.len() == 1 && (bars[0].birth - 1.0).abs() <= 1e-12 && (bars[0].death - 2f64.sqrt()).abs() <= 1e-12;
    Outcome {
        pass,
        detail: format!("barcode {:?}", out.barcode.sorted_pairs()),
    }
}

fn stream_matches<T: Scalar, const D: usize>(c: &PointCloud<T, D>, k: usize) -> bool {
    let idx = SpatialIndex::build(c);
    let got: Vec<_> = init_stream(c, &idx, k).map(|(y, z, _)| (y, z)).collect();
    let n = c.len() as u32;
    let mut want: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    want.sort_by(|&(a, b), &(x, y)| SimplexKey::edge(a, b, c).total_cmp(&SimplexKey::edge(x, y, c)));
    got == want
}

fn edge_stream() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..50u64 {
        let n = 2 + (i as usize * 53) % 99;
        for k in [1, default_k(n), n] {
            let ok = if i % 2 == 0 {
                stream_matches(&uniform_noise::<f64, 2>(n, 100 + i).unwrap(), k)
            } else {
                stream_matches(
                    &generate::<f64, 3>(&GeneratorSpec::new(Family::SolidTorus, n, 100 + i)).unwrap(),
                    k,
                )
            };
            if !ok {
                bad.push(format!("cloud {i} n={n} k={k}"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} of 150 (cloud, k) runs emit the sorted edge list{}",
            150 - bad.len(),
            first(&bad)
        ),
    }
}

fn scaling_runs(family: Family, sizes: &[usize], seeds: u64, records: &mut Vec<BenchRecord>) -> Result<f64, String> {
    let mut points = Vec::new();
    for &n in sizes {
        for seed in 0..seeds {
            let r = bench_one(family, n, seed, Some(k_schedule(family, n)), Some(MEM_CEILING_MB))
                .map_err(|e| e.to_string())?;
            println!("  bench {}", r.csv_row());
            points.push((n as f64, r.seconds));
            records.push(r);
        }
    }
    loglog_slope(&points).ok_or_else(|| "no slope".to_string())
}

fn slope_outcome(family: Family, slope: &Result<f64, String>, lo: f64, hi: f64) -> String {
    match slope {
        Ok(s) => format!(
            "{family} slope {s:.3} (want [{lo}, {hi}]) {}",
            if (lo..=hi).contains(s) { "ok" } else { "out of range" }
        ),
        Err(e) => format!("{family} failed: {e}"),
    }
}

fn main() -> ExitCode {
    let mut outcomes: Vec<(usize, &str, Outcome)> = Vec::new();

    let mut reports = Vec::with_capacity(TRIALS);
    let mut errors = Vec::new();
    for i in 0..TRIALS {
        match run_trial(&trial_spec(i, SUITE_SEED, 8, 48)) {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(format!("trial {i}: {e}")),
        }
    }
    let mut c1 = trial_outcome(&reports, &[Check::Barcode], "match the full and reduced oracles");
    if !errors.is_empty() {
        c1.pass = false;
        c1.detail
            .push_str(&format!("; {} trials errored{}", errors.len(), first(&errors)));
    }
    outcomes.push((1, "oracle equivalence", c1));
    outcomes.push((
        2,
        "selection invariance",
        trial_outcome(
            &reports,
            &[Check::Selection],
            "give equal barcodes under min and max rules",
        ),
    ));
    outcomes.push((3, "graph chain", graph_chain()));
    outcomes.push((
        4,
        "stopping count",
        trial_outcome(
            &reports,
            &[Check::Stopping, Check::NonApparent],
            "have deaths = |RNG| - (n - 1) = non-apparent pairs",
        ),
    ));
    let mut c5 = trial_outcome(
        &reports,
        &[Check::ComponentBound, Check::LensWitness],
        "respect the component bound and lens witnesses",
    );
    let witnessed: usize = reports.iter().map(|r| r.lens_witness_edges).sum();
    let worst = reports
        .iter()
        .map(|r| (r.max_components, r.dim))
        .max()
        .unwrap_or((0, 2));
    c5.detail.push_str(&format!(
        "; {witnessed} witnessed edges, max components {} (bound {})",
        worst.0,
        component_bound(worst.1)
    ));
    outcomes.push((5, "lune components", c5));
    outcomes.push((6, "unit square", unit_square()));
    outcomes.push((7, "edge stream", edge_stream()));

    let mut records = Vec::new();
    let square = scaling_runs(Family::UniformSquare, &[1_000, 10_000, 100_000], 3, &mut records);
    let peak = peak_rss_mb();
    let cube = scaling_runs(Family::UniformCube, &[1_000, 10_000, 100_000], 3, &mut records);
    let annulus = scaling_runs(Family::Annulus, &[1_000, 2_500, 5_000, 10_000], 1, &mut records);
    let in_range = |s: &Result<f64, String>, lo: f64, hi: f64| s.as_ref().is_ok_and(|s| (lo..=hi).contains(s));
    outcomes.push((
        8,
        "scaling",
        Outcome {
            pass: in_range(&square, 1.0, 1.8) && in_range(&cube, 1.0, 1.8) && in_range(&annulus, 2.0, 3.2),
            detail: [
                slope_outcome(Family::UniformSquare, &square, 1.0, 1.8),
                slope_outcome(Family::UniformCube, &cube, 1.0, 1.8),
                slope_outcome(Family::Annulus, &annulus, 2.0, 3.2),
            ]
            .join("; "),
        },
    ));

    let large: Vec<_> = records
        .iter()
        .filter(|r| matches!(r.family, Family::UniformSquare | Family::UniformCube) && r.n >= 10_000)
        .collect();
    let ratios: Vec<f64> = large.iter().map(|r| r.ratio()).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcomes.push((
        9,
        "edge/triangle ratio",
        Outcome {
            pass: !ratios.is_empty() && ratios.iter().all(|r| (0.8..=1.2).contains(r)),
            detail: format!(
                "{} runs with n >= 1e4, ratio range [{lo:.4}, {hi:.4}] (want [0.8, 1.2])",
                ratios.len()
            ),
        },
    ));

    let big_square_ok = records
        .iter()
        .filter(|r| r.family == Family::UniformSquare && r.n == 100_000)
        .count()
        == 3;
    outcomes.push((
        10,
        "memory",
        match peak {
            Some(mb) => Outcome {
                pass: big_square_ok && mb < MEM_CEILING_MB,
                detail: format!("peak RSS {mb} MB after three square runs at n = 1e5 (ceiling {MEM_CEILING_MB} MB)"),
            },
            None => Outcome {
                pass: false,
                detail: "peak RSS unavailable".to_string(),
            },
        },
    ));

    println!();
    for (id, name, o) in &outcomes {
        report(*id, name, o);
    }
    let failed = outcomes.iter().filter(|(_, _, o)| !o.pass).count();
    println!(
        "acceptance: {} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
