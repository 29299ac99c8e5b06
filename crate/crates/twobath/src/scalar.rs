//! Scalar abstraction: the whole crate is generic over one floating-point
//! trait so that the same code runs at `f32`, `f64`, or any conforming type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate.
///
/// This is a blanket trait: anything that is a [`num_traits::Float`] with
/// constants, primitive conversions, and the usual thread-safety bounds
/// qualifies automatically (`f32` and `f64` in particular). Default
/// tolerances quoted in the documentation assume `f64`; narrower types work
/// but need correspondingly looser tolerances.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`. Panics only if `T` cannot represent
/// any `f64` at all, which no `Real` type in practice fails.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// `1/2` in `T`, used pervasively by the symplectic machinery.
#[inline]
pub(crate) fn half<T: Real>() -> T {
    lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lit_round_trips_f32_and_f64() {
        assert_eq!(lit::<f64>(0.1275), 0.1275);
        assert_eq!(lit::<f32>(2.0), 2.0f32);
        assert_eq!(half::<f64>(), 0.5);
    }
}
