//! Scalar abstraction shared by the numeric layers (geometry, physics, recon).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `[-π, π)`. Angles already inside `[-π, π]` are
/// returned untouched.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let pi = T::PI();
    if a >= -pi && a <= pi {
        return a;
    }
    let two_pi = pi + pi;
    let mut w = (a + pi) % two_pi;
    if w < T::zero() {
        w += two_pi;
    }
    w - pi
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_keeps_in_range_values_bitwise() {
        for a in [-PI, -1.0, 0.0, 0.3, PI] {
            assert_eq!(wrap_angle(a).to_bits(), a.to_bits());
        }
    }

    #[test]
    fn wrap_folds_out_of_range() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(-5.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(7.0f32) - (7.0 - 2.0 * std::f32::consts::PI)).abs() < 1e-5);
    }
}
