//! Scalar abstraction shared by every numerical module.

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerical routines are generic over: `f32` or `f64`.
///
/// Index values never live in this type; they are exact [`crate::HalfInt`]s.
pub trait Real:
    RealField + Copy + FloatConst + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or configuration value.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
