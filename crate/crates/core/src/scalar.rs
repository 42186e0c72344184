//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrices hold `Complex<T>` where `T: Real`. Tolerances that the
//! library applies on its own (hermiticity, consistency between two
//! computation routes) come from this trait so that `f32` instantiations
//! get thresholds that make sense at single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as the real part of a matrix entry: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Default absolute tolerance for positivity verdicts.
    fn default_tol() -> Self;
    /// Relative threshold on `max |A - A^†|` accepted by [`HermitianMatrix`](crate::HermitianMatrix).
    fn hermiticity_tol() -> Self;
    /// Agreement required between two independent computation routes of the same quantity.
    fn consistency_tol() -> Self;
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-10
    }
    fn hermiticity_tol() -> Self {
        1e-12
    }
    fn consistency_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }
    fn hermiticity_tol() -> Self {
        1e-5
    }
    fn consistency_tol() -> Self {
        1e-4
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in target float")
}

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}
