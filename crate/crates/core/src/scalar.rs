//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All simulation and learning code is written against [`Real`], so the same
//! routines run in `f32` or `f64`. Tolerances are expressed in `f64` and
//! widened through [`tol`] when the scalar type cannot resolve them.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar usable by the simulator.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// A tolerance of `t`, widened to 1000 ulps of the scalar type when `t` is
/// below what the type can resolve.
#[inline]
pub fn tol<T: Real>(t: f64) -> T {
    let floor = T::epsilon().to_f64().unwrap_or(f64::EPSILON) * 1.0e3;
    lit(t.max(floor))
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `e^{i phi}`.
#[inline]
pub(crate) fn cis<T: Real>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_widens_for_single_precision() {
        assert_eq!(tol::<f64>(1e-10), 1e-10);
        assert!(tol::<f32>(1e-10) > 1e-5);
    }
}
