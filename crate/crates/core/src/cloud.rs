//! Labelled point clouds.
//!
//! Points are addressed by a zero-based [`PointId`]. The label of a point,
//! as used in the total order on simplices and in every file the crate
//! writes, is `id + 1`, i.e. its 1-based position in the input.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::scalar::{dist_sq, Scalar};

/// Zero-based point index. Ordering on ids equals ordering on labels.
pub type PointId = u32;

/// A finite set of distinct points in `R^D`, `D` in {2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T, const D: usize> {
    points: Vec<[T; D]>,
}

impl<T: Scalar, const D: usize> PointCloud<T, D> {
    /// Validates and wraps `points`. Rejects empty input, non-finite
    /// coordinates, dimensions other than 2 or 3, and duplicate points.
    pub fn new(points: Vec<[T; D]>) -> Result<Self> {
        if D != 2 && D != 3 {
            return Err(Error::InvalidInput(format!(
                "unsupported dimension {D}; expected 2 or 3"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("point cloud is empty".into()));
        }
        if points.len() >= u32::MAX as usize {
            return Err(Error::InvalidInput("too many points".into()));
        }
        let mut seen: FxHashMap<[u64; D], u32> = FxHashMap::default();
        seen.reserve(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {} has a non-finite coordinate",
                    i + 1
                )));
            }
            // -0.0 and 0.0 are the same location.
            let key = p.map(|c| (c + T::zero()).to_bits_u64());
            if let Some(&first) = seen.get(&key) {
                return Err(Error::DuplicatePoint {
                    first: first + 1,
                    second: i as u32 + 1,
                });
            }
            seen.insert(key, i as u32);
        }
        Ok(Self { points })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        D
    }

    #[inline]
    pub fn point(&self, id: PointId) -> &[T; D] {
        &self.points[id as usize]
    }

    #[inline]
    pub fn points(&self) -> &[[T; D]] {
        &self.points
    }

    /// Squared Euclidean distance between two points.
    #[inline]
    pub fn dist_sq(&self, a: PointId, b: PointId) -> T {
        dist_sq(&self.points[a as usize], &self.points[b as usize])
    }

    /// Coordinates widened to `f64` and padded to three components.
    pub fn to_f64_padded(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|p| {
                let mut out = [0.0; 3];
                for (o, c) in out.iter_mut().zip(p.iter()) {
                    *o = c.to_f64_exact();
                }
                out
            })
            .collect()
    }

    pub fn into_points(self) -> Vec<[T; D]> {
        self.points
    }
}

/// 1-based label of a point id.
#[inline]
pub fn label(id: PointId) -> u32 {
    id + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_with_labels() {
        let err = PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]).unwrap_err();
        match err {
            Error::DuplicatePoint { first, second } => assert_eq!((first, second), (1, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn signed_zero_is_a_duplicate() {
        assert!(PointCloud::new(vec![[0.0f64, 1.0], [-0.0, 1.0]]).is_err());
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(PointCloud::<f64, 2>::new(vec![]).is_err());
        assert!(PointCloud::new(vec![[f64::NAN, 0.0]]).is_err());
        assert!(PointCloud::new(vec![[1.0f32, 2.0, f32::INFINITY]]).is_err());
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(PointCloud::new(vec![[0.0f64; 4]]).is_err());
        assert!(PointCloud::new(vec![[0.0f64; 1]]).is_err());
    }

    #[test]
    fn distances() {
        let c = PointCloud::new(vec![[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(c.dist_sq(0, 1), 25.0);
        assert_eq!(c.len(), 2);
        assert_eq!(label(0), 1);
    }
}
