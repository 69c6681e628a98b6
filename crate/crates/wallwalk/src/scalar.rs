//! Scalar abstraction for the numeric core.
//!
//! Everything mathematical in this crate is written against [`Real`], a
//! floating-point trait alias, so the same code runs at `f32` and `f64`.
//! The statistical harness and the CLI pin `f64`.

use core::fmt::{Debug, Display};
use core::iter::Sum;
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the numeric core.
pub trait Real:
    Float + FromPrimitive + AddAssign + SubAssign + MulAssign + DivAssign + Sum + Debug + Display + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Debug
        + Display
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if the target type cannot represent any `f64`, which does not
/// happen for the standard float types.
#[inline]
pub fn cast<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant must convert into the scalar type")
}

/// Converts a `usize` into the working scalar type.
#[inline]
pub fn cast_usize<T: Real>(v: usize) -> T {
    T::from_usize(v).expect("usize must convert into the scalar type")
}

/// `n!` as a scalar. Intended for small `n`; overflows to `inf` gracefully.
#[inline]
pub fn factorial<T: Real>(n: usize) -> T {
    let mut acc = T::one();
    for i in 1..=n {
        acc *= cast_usize::<T>(i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cast_round_trips_basic_constants() {
        assert_eq!(cast::<f64>(0.5), 0.5);
        assert_eq!(cast::<f32>(0.5), 0.5f32);
        assert_eq!(cast_usize::<f64>(7), 7.0);
    }

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial::<f64>(0), 1.0);
        assert_eq!(factorial::<f64>(1), 1.0);
        assert_eq!(factorial::<f64>(5), 120.0);
        assert_eq!(factorial::<f32>(6), 720.0f32);
    }
}
