//! Scalar abstraction shared by the geometric and codec primitives.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the geometry, ray and codec primitives.
///
/// Implemented for `f32` and `f64`; the simulator and the data pipeline
/// are instantiated at `f64` (see the aliases at the crate root).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only for values that cannot be
    /// represented at all (never the case for the constants used here).
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
