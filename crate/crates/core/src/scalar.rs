//! Scalar abstraction shared by the numeric layers.
//!
//! Linear algebra, entropies and the Rényi solvers are written against [`Real`]
//! so they run in either `f32` or `f64`. Absolute tolerances are expressed in
//! `f64` and floored at [`Real::TOLERANCE_FLOOR`], which keeps the same code
//! meaningful in single precision.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point type usable throughout the crate: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Smallest absolute tolerance that makes sense at this precision.
    const TOLERANCE_FLOOR: f64;
}

impl Real for f32 {
    const TOLERANCE_FLOOR: f64 = 1e-5;
}

impl Real for f64 {
    const TOLERANCE_FLOOR: f64 = 0.0;
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an `f64` tolerance into `T`, applying the precision floor.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    lit(x.max(T::TOLERANCE_FLOOR))
}

/// Lossy conversion to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Base-2 logarithm.
#[inline]
pub fn log2<T: Real>(x: T) -> T {
    x.ln() / T::ln_2()
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub fn entropy_term<T: Real>(p: T) -> T {
    if p <= T::zero() {
        T::zero()
    } else {
        -p * log2(p)
    }
}

/// Modulus of a complex number.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
