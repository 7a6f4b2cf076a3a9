//! Scalar abstraction shared by every kernel in the crate.
//!
//! Products, transforms and pattern predicates only need field arithmetic and
//! a magnitude, so they are written against [`Scalar`]. That covers real and
//! complex floats as well as exact rationals. Routines that take roots or
//! logarithms (the diagonal solver, the characteristic polynomial) are
//! written against `Complex<F>` with `F: Real` instead.

use std::fmt::Debug;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, NumAssign, NumCast, ToPrimitive};

/// Floating point base type: `f32` or `f64`.
pub trait Real: Float + FloatConst + NumAssign + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal (tolerances, constants).
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Element type of a [`Tensor`](crate::Tensor).
pub trait Scalar:
    Clone + Debug + PartialEq + num_traits::Num + std::ops::Neg<Output = Self> + Send + Sync + 'static
{
    /// Float type used for magnitudes and tolerances.
    type Real: Real;

    /// Absolute value (modulus for complex scalars).
    fn modulus(&self) -> Self::Real;

    /// Embeds a real number. Rationals round through `f64`.
    fn from_real(x: Self::Real) -> Self;
}

impl Scalar for f32 {
    type Real = f32;
    fn modulus(&self) -> f32 {
        self.abs()
    }
    fn from_real(x: f32) -> Self {
        x
    }
}

impl Scalar for f64 {
    type Real = f64;
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl<F: Real> Scalar for Complex<F> {
    type Real = F;
    fn modulus(&self) -> F {
        self.norm()
    }
    fn from_real(x: F) -> Self {
        Complex::new(x, F::zero())
    }
}

macro_rules! impl_ratio {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            type Real = f64;
            fn modulus(&self) -> f64 {
                self.to_f64().map_or(f64::INFINITY, f64::abs)
            }
            fn from_real(x: f64) -> Self {
                Ratio::<$int>::approximate_float(x).expect("finite value")
            }
        }
    };
}

impl_ratio!(i64);
impl_ratio!(i128);

/// `x^t` for an integer exponent by repeated multiplication. Negative
/// exponents multiply the reciprocal, never going through `ln`/`exp`.
pub fn int_pow<S: Scalar>(x: &S, t: i64) -> S {
    let base = if t < 0 { S::one() / x.clone() } else { x.clone() };
    let mut acc = S::one();
    for _ in 0..t.unsigned_abs() {
        acc = acc * base.clone();
    }
    acc
}

/// Mixed absolute/relative distance `|x - y| / max(1, |y|)`.
pub fn scaled_distance<S: Scalar>(x: &S, y: &S) -> S::Real {
    let diff = (x.clone() - y.clone()).modulus();
    diff / y.modulus().max(<S::Real as num_traits::One>::one())
}
