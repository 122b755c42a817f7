use std::fmt::Debug;
use std::ops::{AddAssign, SubAssign};

use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Scalar weight of a probability atom.
///
/// Implemented by `f64` (fast path) and `num::BigRational` (exact path).
/// Exact weights make small convolution and series computations free of
/// rounding, which is how reference values for the f64 path are produced.
pub trait Weight:
    Clone + PartialOrd + Debug + Signed + FromPrimitive + ToPrimitive + AddAssign + SubAssign
{
    /// Lossy view as f64, for reports and tolerance checks.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Weight for T where
    T: Clone + PartialOrd + Debug + Signed + FromPrimitive + ToPrimitive + AddAssign + SubAssign
{
}
