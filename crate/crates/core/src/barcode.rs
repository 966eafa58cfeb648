//! Degree-1 barcodes and their CSV form.

use std::cmp::Ordering;
use std::io::Write;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::simplex::SimplexKey;

/// Half-open interval `[birth, death)` with the simplices that created and
/// killed the class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarcodeInterval<T> {
    pub birth: T,
    pub death: T,
    pub birth_simplex: SimplexKey<T>,
    pub death_simplex: SimplexKey<T>,
}

impl<T: Scalar> BarcodeInterval<T> {
    pub fn persistence(&self) -> T {
        self.death - self.birth
    }
}

/// Intervals in the order they were found.
#[derive(Debug, Clone, PartialEq)]
pub struct Barcode<T> {
    pub intervals: Vec<BarcodeInterval<T>>,
}

impl<T> Default for Barcode<T> {
    fn default() -> Self {
        Self { intervals: Vec::new() }
    }
}

impl<T: Scalar> Barcode<T> {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `(birth, death)` pairs sorted, for multiset comparison.
    pub fn sorted_pairs(&self) -> Vec<(T, T)> {
        let mut pairs: Vec<(T, T)> = self.intervals.iter().map(|i| (i.birth, i.death)).collect();
        pairs.sort_by(|a, b| cmp_pair(*a, *b));
        pairs
    }

    /// Equal as multisets of `(birth, death)` with exact float equality.
    pub fn same_pairs(&self, other: &Self) -> bool {
        self.sorted_pairs() == other.sorted_pairs()
    }

    /// Writes `birth,death,birth_edge,death_triangle` rows; simplices are
    /// given by their labels joined with `-`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "birth,death,birth_edge,death_triangle")?;
        for i in &self.intervals {
            writeln!(
                out,
                "{},{},{},{}",
                i.birth,
                i.death,
                join_labels(&i.birth_simplex),
                join_labels(&i.death_simplex)
            )?;
        }
        Ok(())
    }
}

fn cmp_pair<T: Scalar>(a: (T, T), b: (T, T)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
}

fn join_labels<T: Scalar>(s: &SimplexKey<T>) -> String {
    s.labels().iter().map(u32::to_string).collect::<Vec<_>>().join("-")
}

/// Counts from one run of the reduced-complex engine.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Neighbour count used by the edge stream.
    pub k: usize,
    pub rng_size: usize,
    pub total_bars: usize,
    /// Non-apparent deaths found by reduction, including zero-length ones.
    pub death_count: usize,
    /// 1-simplices taken from the stream.
    pub edges_processed: u64,
    /// 2-simplices (columns) created.
    pub triangles_processed: u64,
    /// Columns that reduced to zero.
    pub cycles_born: u64,
    pub empty_lunes: u64,
    pub lens_ball_hits: u64,
    pub lens_scan_hits: u64,
    pub component_lunes: u64,
    pub max_components: usize,
    pub row_extensions: usize,
    pub column_additions: u64,
}

/// Headline numbers for a barcode and its run.
#[derive(Debug, Clone, PartialEq)]
pub struct BarcodeSummary {
    pub intervals: usize,
    pub max_persistence: f64,
    pub edges_processed: u64,
    pub triangles_processed: u64,
    /// `edges_processed / triangles_processed`, or `None` with no triangles.
    pub simplex_ratio: Option<f64>,
}

pub fn barcode_summary<T: Scalar>(barcode: &Barcode<T>, stats: &RunStats) -> BarcodeSummary {
    let max_persistence = barcode
        .intervals
        .iter()
        .map(|i| i.persistence().to_f64_exact())
        .fold(0.0, f64::max);
    BarcodeSummary {
        intervals: barcode.len(),
        max_persistence,
        edges_processed: stats.edges_processed,
        triangles_processed: stats.triangles_processed,
        simplex_ratio: (stats.triangles_processed > 0)
            .then(|| stats.edges_processed as f64 / stats.triangles_processed as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;

    fn unit_square_barcode() -> Barcode<f64> {
        let c = PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        Barcode {
            intervals: vec![BarcodeInterval {
                birth: 1.0,
                death: 2f64.sqrt(),
                birth_simplex: SimplexKey::edge(2, 3, &c),
                death_simplex: SimplexKey::triangle(0, 2, 3, &c),
            }],
        }
    }

    #[test]
    fn csv_rows() {
        let mut out = Vec::new();
        unit_square_barcode().write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "birth,death,birth_edge,death_triangle\n1,1.4142135623730951,3-4,1-3-4\n"
        );
    }

    #[test]
    fn summaries() {
        let empty = barcode_summary(&Barcode::<f64>::default(), &RunStats::default());
        assert_eq!(empty.intervals, 0);
        assert_eq!(empty.max_persistence, 0.0);
        assert_eq!(empty.simplex_ratio, None);
        let s = barcode_summary(&unit_square_barcode(), &RunStats::default());
        assert_eq!(s.intervals, 1);
        assert_eq!(s.max_persistence, 2f64.sqrt() - 1.0);
    }

    #[test]
    fn multiset_comparison_ignores_order() {
        let mut a = unit_square_barcode();
        let mut second = a.intervals[0];
        second.birth = 0.5;
        a.intervals.push(second);
        let mut b = a.clone();
        b.intervals.reverse();
        assert!(a.same_pairs(&b));
        b.intervals.pop();
        assert!(!a.same_pairs(&b));
    }
}
