//! Floating-point scalar abstraction.
//!
//! All numerical code in this crate is generic over [`Scalar`], so the same
//! routines run in `f32` or `f64`. The crate root exposes concrete `f64`
//! aliases for the common entry points.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants and RNG output.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
