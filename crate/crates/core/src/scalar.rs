//! Floating-point scalar abstraction for the selection math.
//!
//! Everything that manipulates fractional solutions (residual products, the
//! multilinear extension and its partial derivatives, rounding) is generic over
//! [`Scalar`]. `f64` is the reference precision; `f32` halves the cache footprint
//! on very large RR collections at the cost of looser drift guarantees.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Residual factors at or below this value are treated as exact zeros.
    const TAU_ZERO: Self;

    fn of(v: f64) -> Self;

    fn as_f64(self) -> f64;

    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }
}

impl Scalar for f64 {
    const TAU_ZERO: f64 = 1e-12;

    #[inline]
    fn of(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    const TAU_ZERO: f32 = 1e-12;

    #[inline]
    fn of(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
