use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point types the numeric routines are generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn of_i64(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits in a float")
    }

    fn of_u64(v: u64) -> Self {
        Self::from_u64(v).expect("integer fits in a float")
    }

    fn of_f64(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `2^(k/2)`, i.e. an integer power of √2.
    fn sqrt2_pow(k: i32) -> Self {
        let two = Self::of_i64(2);
        let whole = two.powi(k.div_euclid(2));
        if k.rem_euclid(2) == 1 {
            whole * Self::SQRT_2()
        } else {
            whole
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
