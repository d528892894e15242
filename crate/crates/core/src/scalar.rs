//! Scalar abstraction shared by every numerical type in the crate.

use nalgebra::RealField;
use num_traits::{FloatConst, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar: `f32` or `f64`.
///
/// All numerical containers are generic over this trait. Tolerances quoted in
/// the documentation assume `f64`; `f32` works but with correspondingly looser
/// accuracy.
pub trait Real: RealField + Copy + FloatConst + ToPrimitive + Serialize + DeserializeOwned {}

impl<T> Real for T where T: RealField + Copy + FloatConst + ToPrimitive + Serialize + DeserializeOwned {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a working scalar back to `f64` (for reports and thresholds).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}
