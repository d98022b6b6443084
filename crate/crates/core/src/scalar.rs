use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Floating-point type the numeric parts of the toolkit are generic over.
///
/// `Display` output must round-trip through `FromStr` so that model files
/// reload bit-for-bit; both `f32` and `f64` satisfy this.
pub trait Scalar:
    Float + FromPrimitive + Sum + Display + Debug + FromStr + Default + Send + Sync + 'static
{
    /// Lossy conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 representable")
    }

    /// Ratio of two counts, defined as zero when the denominator is zero.
    fn ratio(num: usize, den: usize) -> Self {
        if den == 0 {
            Self::zero()
        } else {
            Self::from_count(num) / Self::from_count(den)
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
