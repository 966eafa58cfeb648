//! Timing runs over generated clouds.

use std::time::Instant;

use crate::barcode::RunStats;
use crate::datagen::{generate, Family, GeneratorSpec};
use crate::error::Result;
use crate::reduction::{compute_ph1, Params};
use crate::stream::default_k;

/// Neighbour count for a benchmark cloud: the tuned value for the sizes
/// of the reference experiments, `floor(sqrt n)` otherwise, capped at
/// `n - 1`.
pub fn k_schedule(family: Family, n: usize) -> usize {
    let tuned = match family {
        Family::UniformSquare => match n {
            1_000 | 2_500 | 5_000 | 10_000 | 25_000 | 50_000 | 100_000 | 250_000 | 500_000 => Some(100),
            1_000_000 => Some(300),
            _ => None,
        },
        Family::Annulus => match n {
            1_000 | 2_500 => Some(100),
            5_000 => Some(200),
            10_000 => Some(1000),
            _ => None,
        },
        Family::UniformCube => match n {
            1_000 | 2_500 | 5_000 | 10_000 | 25_000 | 50_000 => Some(100),
            100_000 => Some(300),
            250_000 | 500_000 | 1_000_000 => Some(1000),
            _ => None,
        },
        Family::SolidTorus => match n {
            1_000 => Some(100),
            2_500 => Some(500),
            5_000 | 10_000 => Some(1000),
            _ => None,
        },
    };
    tuned
        .unwrap_or_else(|| default_k(n))
        .clamp(1, n.saturating_sub(1).max(1))
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than
/// two distinct `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (logs.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

/// One timed run.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub k: usize,
    pub seconds: f64,
    pub intervals: usize,
    pub stats: RunStats,
}

impl BenchRecord {
    pub const CSV_HEADER: &'static str = "family,n,seed,k,seconds,edges_processed,triangles_processed,ratio,intervals";

    pub fn ratio(&self) -> f64 {
        if self.stats.triangles_processed == 0 {
            f64::NAN
        } else {
            self.stats.edges_processed as f64 / self.stats.triangles_processed as f64
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{},{:.6},{}",
            self.family,
            self.n,
            self.seed,
            self.k,
            self.seconds,
            self.stats.edges_processed,
            self.stats.triangles_processed,
            self.ratio(),
            self.intervals
        )
    }
}

/// Generates the cloud (untimed) and times `compute_ph1` on it. `k = None`
/// uses [`k_schedule`].
pub fn bench_one(
    family: Family,
    n: usize,
    seed: u64,
    k: Option<usize>,
    mem_limit_mb: Option<u64>,
) -> Result<BenchRecord> {
    let spec = GeneratorSpec::new(family, n, seed);
    let k = k.unwrap_or_else(|| k_schedule(family, n));
    let params = Params {
        k: Some(k),
        mem_limit_mb,
        ..Params::default()
    };
    let (seconds, out) = match family.dim() {
        2 => {
            let cloud = generate::<f64, 2>(&spec)?;
            let t = Instant::now();
            let out = compute_ph1(&cloud, &params)?;
            (t.elapsed().as_secs_f64(), (out.barcode.len(), out.stats))
        }
        _ => {
            let cloud = generate::<f64, 3>(&spec)?;
            let t = Instant::now();
            let out = compute_ph1(&cloud, &params)?;
            (t.elapsed().as_secs_f64(), (out.barcode.len(), out.stats))
        }
    };
    Ok(BenchRecord {
        family,
        n,
        seed,
        k: out.1.k,
        seconds,
        intervals: out.0,
        stats: out.1,
    })
}
