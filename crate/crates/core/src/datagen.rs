//! Seeded synthetic clouds and point-file I/O.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`; a uniform draw on `[0, 1)` is the top 53 bits of
//! `next_u64` scaled by `2^-53`. Both are platform independent, so a seed
//! fixes the cloud everywhere.

use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    UniformSquare,
    Annulus,
    UniformCube,
    SolidTorus,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::UniformSquare,
        Family::Annulus,
        Family::UniformCube,
        Family::SolidTorus,
    ];

    pub fn dim(self) -> usize {
        match self {
            Family::UniformSquare | Family::Annulus => 2,
            Family::UniformCube | Family::SolidTorus => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformSquare => "uniform_square",
            Family::Annulus => "annulus",
            Family::UniformCube => "uniform_cube",
            Family::SolidTorus => "solid_torus",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family `{s}`")))
    }
}

/// Shape parameters of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Side length of the square or cube `[0, side]^D`.
    Box {
        side: f64,
    },
    Annulus {
        r_in: f64,
        r_out: f64,
    },
    /// Major radius `big_r`, minor radius `small_r`.
    Torus {
        big_r: f64,
        small_r: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub geometry: Geometry,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Benchmark parameters: side 10, annulus radii 2 and 3, torus radii
    /// 3 and 1.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        let geometry = match family {
            Family::UniformSquare | Family::UniformCube => Geometry::Box { side: 10.0 },
            Family::Annulus => Geometry::Annulus { r_in: 2.0, r_out: 3.0 },
            Family::SolidTorus => Geometry::Torus {
                big_r: 3.0,
                small_r: 1.0,
            },
        };
        Self {
            family,
            n,
            geometry,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        let ok = |x: f64| x.is_finite() && x > 0.0;
        match (self.family, self.geometry) {
            (Family::UniformSquare | Family::UniformCube, Geometry::Box { side }) if ok(side) => Ok(()),
            (Family::Annulus, Geometry::Annulus { r_in, r_out }) if ok(r_in) && ok(r_out) && r_in < r_out => Ok(()),
            (Family::SolidTorus, Geometry::Torus { big_r, small_r }) if ok(big_r) && ok(small_r) => Ok(()),
            _ => bad("geometry parameters must be positive and match the family (r_in < r_out)"),
        }
    }
}

struct Uniform(ChaCha8Rng);

impl Uniform {
    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

/// Samples `spec.n` points as `f64` coordinates of dimension
/// `spec.family.dim()`.
///
/// The solid torus uses `x = (R + r cos t) cos p`, `y = (R + r cos t) sin p`,
/// `z = r sin t` with `r` uniform on `[0, small_r]` and both angles uniform,
/// which is not uniform in volume. Coincident samples are redrawn.
pub fn generate_raw(spec: &GeneratorSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let mut u = Uniform(ChaCha8Rng::seed_from_u64(spec.seed));
    let mut seen = std::collections::HashSet::with_capacity(spec.n);
    let mut out = Vec::with_capacity(spec.n);
    while out.len() < spec.n {
        let p = match spec.geometry {
            Geometry::Box { side } => (0..spec.family.dim()).map(|_| u.range(0.0, side)).collect(),
            Geometry::Annulus { r_in, r_out } => {
                let r = u.range(r_in, r_out);
                let t = u.range(0.0, TAU);
                vec![r * t.cos(), r * t.sin()]
            }
            Geometry::Torus { big_r, small_r } => {
                let r = u.range(0.0, small_r);
                let t = u.range(0.0, TAU);
                let p = u.range(0.0, TAU);
                let w = big_r + r * t.cos();
                vec![w * p.cos(), w * p.sin(), r * t.sin()]
            }
        };
        let bits: Vec<u64> = p.iter().map(|c: &f64| (c + 0.0).to_bits()).collect();
        if seen.insert(bits) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Samples a cloud of dimension `D`, which must match the family.
pub fn generate<T: Scalar, const D: usize>(spec: &GeneratorSpec) -> Result<PointCloud<T, D>> {
    if spec.family.dim() != D {
        return Err(Error::InvalidSpec(format!(
            "{} is {}-dimensional, not {D}-dimensional",
            spec.family,
            spec.family.dim()
        )));
    }
    let raw = generate_raw(spec)?;
    from_rows(raw.iter().map(|r| r.as_slice()))
}

/// `n` points uniform on `[0, 1)^D`.
pub fn uniform_noise<T: Scalar, const D: usize>(n: usize, seed: u64) -> Result<PointCloud<T, D>> {
    let mut u = Uniform(ChaCha8Rng::seed_from_u64(seed));
    let pts = (0..n)
        .map(|_| {
            let mut p = [T::zero(); D];
            for c in &mut p {
                *c = T::from_f64(u.next()).expect("representable");
            }
            p
        })
        .collect();
    PointCloud::new(pts)
}

fn from_rows<'a, T: Scalar, const D: usize>(rows: impl Iterator<Item = &'a [f64]>) -> Result<PointCloud<T, D>> {
    let pts = rows
        .map(|r| {
            let mut p = [T::zero(); D];
            for (c, &v) in p.iter_mut().zip(r) {
                *c = T::from_f64(v).expect("representable");
            }
            p
        })
        .collect();
    PointCloud::new(pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    /// Comma-separated coordinates.
    Csv,
    /// Whitespace-separated coordinates.
    Xyz,
}

impl PointFormat {
    /// Format from the file extension; `.xyz` and `.txt` are whitespace
    /// separated, anything else comma separated.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("xyz") | Some("txt") => PointFormat::Xyz,
            _ => PointFormat::Csv,
        }
    }
}

/// Parses point rows. Blank lines and `#` comments are skipped, and a first
/// line that does not parse as numbers is taken as a header. With
/// `dim = None` the dimension is that of the first data row.
pub fn parse_points(text: &str, format: PointFormat, dim: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dim = dim;
    let mut first_content = true;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match format {
            PointFormat::Csv => t.split(',').map(str::trim).collect(),
            PointFormat::Xyz => t.split_whitespace().collect(),
        };
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let is_header = first_content && parsed.is_err();
        first_content = false;
        if is_header {
            continue;
        }
        let row = parsed.map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad number: {e}"),
        })?;
        let want = *dim.get_or_insert(row.len());
        if !(2..=3).contains(&want) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 or 3 coordinates, found {want}"),
            });
        }
        if row.len() != want {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {want} coordinates, found {}", row.len()),
            });
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite coordinate {bad}"),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no points".into(),
        });
    }
    Ok(rows)
}

/// Dimension of the first data row of a point file.
pub fn detect_dim(path: &Path) -> Result<usize> {
    let text = fs::read_to_string(path)?;
    Ok(parse_points(&text, PointFormat::from_path(path), None)?[0].len())
}

/// Reads a `D`-dimensional cloud.
pub fn load_points<T: Scalar, const D: usize>(path: &Path, format: PointFormat) -> Result<PointCloud<T, D>> {
    let text = fs::read_to_string(path)?;
    let rows = parse_points(&text, format, Some(D))?;
    from_rows(rows.iter().map(|r| r.as_slice()))
}

/// Writes one point per line, each coordinate in shortest round-trip
/// decimal form.
pub fn save_points<T: Scalar, const D: usize>(
    cloud: &PointCloud<T, D>,
    path: &Path,
    format: PointFormat,
) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    write_points(cloud.points().iter().map(|p| p.as_slice()), &mut out, format)?;
    out.flush()?;
    Ok(())
}

pub fn write_points<'a, T: Scalar, W: Write>(
    rows: impl Iterator<Item = &'a [T]>,
    out: &mut W,
    format: PointFormat,
) -> Result<()> {
    let sep = match format {
        PointFormat::Csv => ",",
        PointFormat::Xyz => " ",
    };
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", line.join(sep))?;
    }
    Ok(())
}
