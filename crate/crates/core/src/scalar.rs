//! Scalar abstraction shared by the weighted-graph and LP code.
//!
//! Everything that only needs ordered field arithmetic is written against
//! [`Scalar`], so the same solver runs on `f64`, `f32`, or exact
//! [`BigRational`] values. Exact instantiations use zero tolerances.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Magnitudes at or below this are treated as zero in pivoting decisions.
    fn pivot_eps() -> Self;

    /// Absolute slack used when comparing a value against a threshold.
    fn threshold_slack() -> Self;

    fn is_exact() -> bool {
        false
    }

    fn from_usize_lossless(v: usize) -> Self {
        Self::from_usize(v).expect("usize fits every supported scalar")
    }

    /// `num / den` as a scalar; exact for rational types.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("i64 conversion") / Self::from_i64(den).expect("i64 conversion")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    /// True when `self >= threshold` up to [`Scalar::threshold_slack`].
    fn at_least(&self, threshold: &Self) -> bool {
        self.clone() + Self::threshold_slack() >= *threshold
    }
}

impl Scalar for f64 {
    fn pivot_eps() -> Self {
        1e-9
    }
    fn threshold_slack() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn pivot_eps() -> Self {
        1e-5
    }
    fn threshold_slack() -> Self {
        1e-6
    }
}

impl Scalar for BigRational {
    fn pivot_eps() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn threshold_slack() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn is_exact() -> bool {
        true
    }
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}
