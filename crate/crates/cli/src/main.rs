use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use reduced_rips::bench::{bench_one, k_schedule, loglog_slope, BenchRecord};
use reduced_rips::datagen::{self, Family, GeneratorSpec, PointFormat};
use reduced_rips::oracle::ORACLE_CAP;
use reduced_rips::resource::{mem_limit_from_env, peak_rss_mb};
use reduced_rips::verify::{run_trial, trial_spec};
use reduced_rips::{barcode_summary, compute_ph1, Error, Params, PointCloud, Scalar, Selection};

#[derive(Parser)]
#[command(
    name = "reduced-rips",
    version,
    about = "Degree-1 Vietoris-Rips persistence of 2D/3D point clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the degree-1 barcode of a point file.
    Compute(ComputeArgs),
    /// Compare the engine with brute-force oracles on random clouds.
    Verify(VerifyArgs),
    /// Time the engine on generated clouds.
    Bench(BenchArgs),
    /// Write a generated cloud to a file.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Xyz,
}

impl From<Format> for PointFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => PointFormat::Csv,
            Format::Xyz => PointFormat::Xyz,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Min,
    Max,
}

#[derive(clap::Args)]
struct ComputeArgs {
    /// Point file, one point per line.
    input: PathBuf,
    /// Nearest neighbours per row of the edge stream [default: floor(sqrt n)].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    /// Dimension of the points [default: from the first row].
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: Option<u8>,
    /// Input format [default: from the extension, csv unless .xyz/.txt].
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Barcode CSV destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print run statistics to stderr.
    #[arg(long)]
    summary: bool,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
    /// Lune representative rule.
    #[arg(long, value_enum, default_value = "min")]
    selection: Rule,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 48)]
    n_max: usize,
    #[arg(long, default_value_t = 8)]
    n_min: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    family: String,
    /// Comma-separated cloud sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Seeds per size; seed values are 0, 1, ...
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// `table` (tuned values, floor(sqrt n) elsewhere), `sqrt`, or a fixed k.
    #[arg(long, default_value = "table")]
    k_schedule: String,
    /// Table destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::InvalidSpec(_) => 2,
        Error::DuplicatePoint { .. } | Error::InvalidInput(_) => 3,
        Error::ResourceLimit { .. } => 4,
        Error::CapExceeded { .. } | Error::Internal(_) => 1,
    }
}

fn output(path: Option<&Path>) -> reduced_rips::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn compute(a: ComputeArgs) -> reduced_rips::Result<ExitCode> {
    let format = a
        .format
        .map(PointFormat::from)
        .unwrap_or_else(|| PointFormat::from_path(&a.input));
    let dim = match a.dim {
        Some(d) => d as usize,
        None => datagen::detect_dim(&a.input)?,
    };
    match (dim, a.precision) {
        (2, Precision::F64) => compute_dim::<f64, 2>(&a, format),
        (2, Precision::F32) => compute_dim::<f32, 2>(&a, format),
        (_, Precision::F64) => compute_dim::<f64, 3>(&a, format),
        (_, Precision::F32) => compute_dim::<f32, 3>(&a, format),
    }
}

fn compute_dim<T: Scalar, const D: usize>(a: &ComputeArgs, format: PointFormat) -> reduced_rips::Result<ExitCode> {
    let cloud: PointCloud<T, D> = datagen::load_points(&a.input, format)?;
    let params = Params {
        k: a.k.map(|k| k as usize),
        selection: match a.selection {
            Rule::Min => Selection::MinLabel,
            Rule::Max => Selection::MaxLabel,
        },
        mem_limit_mb: mem_limit_from_env(),
        ..Params::default()
    };
    let start = Instant::now();
    let out = compute_ph1(&cloud, &params)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut w = output(a.out.as_deref())?;
    out.barcode.write_csv(&mut w)?;
    w.flush()?;
    if a.summary {
        let s = barcode_summary(&out.barcode, &out.stats);
        let st = &out.stats;
        eprintln!("points: {}", cloud.len());
        eprintln!("dimension: {D}");
        eprintln!("k: {}", st.k);
        eprintln!("intervals: {}", s.intervals);
        eprintln!("max_persistence: {}", s.max_persistence);
        eprintln!("rng_edges: {}", st.rng_size);
        eprintln!("total_bars: {}", st.total_bars);
        eprintln!("edges_processed: {}", s.edges_processed);
        eprintln!("triangles_processed: {}", s.triangles_processed);
        if let Some(r) = s.simplex_ratio {
            eprintln!("simplex_ratio: {r:.4}");
        }
        eprintln!("row_extensions: {}", st.row_extensions);
        eprintln!("wall_seconds: {seconds:.3}");
        if let Some(mb) = peak_rss_mb() {
            eprintln!("peak_memory_mb: {mb}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> reduced_rips::Result<ExitCode> {
    let mut n_max = a.n_max;
    if n_max > ORACLE_CAP {
        eprintln!(
            "warning: {}; using n-max = {ORACLE_CAP}",
            Error::CapExceeded {
                n: n_max,
                cap: ORACLE_CAP
            }
        );
        n_max = ORACLE_CAP;
    }
    let n_min = a.n_min.clamp(2, n_max);
    let mut failures = 0;
    for i in 0..a.trials {
        let spec = trial_spec(i, a.seed, n_min, n_max);
        let report = run_trial(&spec)?;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        println!(
            "trial {i}: {verdict} source={} n={} seed={} intervals={} total_bars={}",
            spec.source, spec.n, spec.seed, report.intervals, report.total_bars
        );
        for (check, f) in &report.failures {
            println!("  {check:?}: {f}");
        }
        failures += usize::from(!report.passed());
    }
    println!(
        "{}: {} of {} trials passed",
        if failures == 0 { "PASS" } else { "FAIL" },
        a.trials - failures,
        a.trials
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn bench(a: BenchArgs) -> reduced_rips::Result<ExitCode> {
    let family: Family = a.family.parse()?;
    let fixed_k = match a.k_schedule.as_str() {
        "table" => None,
        "sqrt" => Some(0),
        s => Some(s.parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "k schedule must be `table`, `sqrt` or a positive integer, not `{s}`"
            ))
        })?),
    };
    let mut w = output(a.out.as_deref())?;
    writeln!(w, "{}", BenchRecord::CSV_HEADER)?;
    let mut points = Vec::new();
    for &n in &a.sizes {
        for seed in 0..a.seeds {
            let k = match fixed_k {
                None => k_schedule(family, n),
                Some(0) => reduced_rips::stream::default_k(n),
                Some(k) => k,
            };
            let r = bench_one(family, n, seed, Some(k), mem_limit_from_env())?;
            writeln!(w, "{}", r.csv_row())?;
            w.flush()?;
            points.push((n as f64, r.seconds));
        }
    }
    match loglog_slope(&points) {
        Some(slope) => eprintln!("loglog_slope: {slope:.3}"),
        None => eprintln!("loglog_slope: n/a (needs two sizes)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(a: GenerateArgs) -> reduced_rips::Result<ExitCode> {
    let family: Family = a.family.parse()?;
    let spec = GeneratorSpec::new(family, a.n, a.seed);
    let rows = datagen::generate_raw(&spec)?;
    let format = a
        .format
        .map(PointFormat::from)
        .or_else(|| a.out.as_deref().map(PointFormat::from_path))
        .unwrap_or(PointFormat::Csv);
    let mut w = output(a.out.as_deref())?;
    datagen::write_points(rows.iter().map(|r| r.as_slice()), &mut w, format)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
