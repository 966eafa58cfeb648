use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Floating-point coordinate type: `f32` or `f64`.
///
/// Geometric predicates are evaluated on `f64`; both implementors convert to
/// `f64` without rounding, so the exact predicates see the input coordinates
/// bit for bit.
pub trait Scalar: Float + FromPrimitive + FromStr + Debug + Display + Default + Send + Sync + 'static {
    fn to_f64_exact(self) -> f64;

    /// Raw bit pattern, used to detect coordinate-identical points.
    fn to_bits_u64(self) -> u64;
}

impl Scalar for f32 {
    #[inline]
    fn to_f64_exact(self) -> f64 {
        self as f64
    }

    #[inline]
    fn to_bits_u64(self) -> u64 {
        self.to_bits() as u64
    }
}

impl Scalar for f64 {
    #[inline]
    fn to_f64_exact(self) -> f64 {
        self
    }

    #[inline]
    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }
}

/// Squared Euclidean distance, accumulated coordinate by coordinate from
/// index 0 upward. Every distance in the crate goes through this function so
/// that equal inputs always produce bitwise-equal outputs.
#[inline]
pub fn dist_sq<T: Scalar, const D: usize>(a: &[T; D], b: &[T; D]) -> T {
    let mut acc = T::zero();
    for i in 0..D {
        let d = a[i] - b[i];
        acc = acc + d * d;
    }
    acc
}
