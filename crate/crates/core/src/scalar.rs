//! Scalar abstraction for the numeric core.
//!
//! All physics routines are generic over [`Real`], which is satisfied by
//! `f32` and `f64`. Concrete aliases for the common `f64` instantiation
//! live at the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + FftNum + Sum<Self> + Display + LowerExp + Debug
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + FftNum + Sum<T> + Display + LowerExp + Debug
{
}

/// Shorthand for converting an `f64` literal into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must be representable in the scalar type")
}

/// Complex number over the working scalar type.
pub type C<T> = Complex<T>;

/// `i` as a complex constant.
#[inline]
pub fn imag_unit<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}

/// sin(x)/x with the correct x -> 0 limit.
#[inline]
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < real::<T>(1e-8) {
        T::one() - x * x / real(6.0)
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_limit_and_value() {
        assert!((sinc(0.0f64) - 1.0).abs() < 1e-15);
        let x = 1.3f64;
        assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
        assert!((sinc(1e-10f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_works_for_both_widths() {
        let a: f32 = real(0.5);
        let b: f64 = real(0.5);
        assert_eq!(a, 0.5f32);
        assert_eq!(b, 0.5f64);
    }
}
