//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst};
use rand::distributions::{Distribution, Open01};
use rand::Rng;

/// A real scalar the forecasters can compute with (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// One uniform sample strictly inside (0, 1).
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn half() -> Self {
        Self::from_f64(0.5)
    }

    fn two() -> Self {
        Self::from_f64(2.0)
    }
}

impl Scalar for f32 {
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Open01.sample(rng)
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Open01.sample(rng)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
