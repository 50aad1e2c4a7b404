//! Dither amplitude schedules `h_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A nondecreasing positive amplitude sequence with `h_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DitherSchedule<T> {
    /// `h_t = h1 * t^alpha`.
    PowerLaw {
        h1: T,
        alpha: T,
    },
    Constant {
        h: T,
    },
}

impl<T: Scalar> DitherSchedule<T> {
    pub fn power_law(h1: T, alpha: T) -> Result<Self> {
        DitherSchedule::PowerLaw { h1, alpha }.validated()
    }

    pub fn constant(h: T) -> Result<Self> {
        DitherSchedule::Constant { h }.validated()
    }

    /// `h_t = sqrt(2t / m)`, the amplitude minimizing the bounded-loss regret bound.
    pub fn sqrt_optimal(m: usize) -> Self {
        DitherSchedule::PowerLaw {
            h1: (T::two() / T::from_usize(m)).sqrt(),
            alpha: T::half(),
        }
    }

    /// Checks `h1 > 0`, `0 <= alpha < 1` and `h > 0`, all finite.
    pub fn validated(self) -> Result<Self> {
        match self {
            DitherSchedule::PowerLaw { h1, alpha } => {
                if !(h1.is_finite() && h1 > T::zero()) {
                    return Err(Error::InvalidSchedule(format!(
                        "h1 must be positive, got {h1}"
                    )));
                }
                if !(alpha >= T::zero() && alpha < T::one()) {
                    return Err(Error::InvalidSchedule(format!(
                        "alpha must lie in [0, 1), got {alpha}"
                    )));
                }
            }
            DitherSchedule::Constant { h } => {
                if !(h.is_finite() && h > T::zero()) {
                    return Err(Error::InvalidSchedule(format!(
                        "h must be positive, got {h}"
                    )));
                }
            }
        }
        Ok(self)
    }

    pub fn eval(&self, t: usize) -> T {
        if t == 0 {
            return T::zero();
        }
        match *self {
            DitherSchedule::PowerLaw { h1, alpha } => h1 * T::from_usize(t).powf(alpha),
            DitherSchedule::Constant { h } => h,
        }
    }

    /// Exponent of the growth rate; zero for constant schedules.
    pub fn alpha(&self) -> T {
        match *self {
            DitherSchedule::PowerLaw { alpha, .. } => alpha,
            DitherSchedule::Constant { .. } => T::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p = DitherSchedule::power_law(1.0, 0.5).unwrap();
        assert_eq!(p.eval(4), 2.0);
        assert_eq!(p.eval(0), 0.0);
        let c = DitherSchedule::constant(0.5).unwrap();
        assert_eq!(c.eval(100), 0.5);
        assert_eq!(c.eval(0), 0.0);
    }

    #[test]
    fn sqrt_optimal_matches_closed_form() {
        let s = DitherSchedule::<f64>::sqrt_optimal(3);
        for t in [1usize, 7, 100, 4096] {
            let expected = (2.0 * t as f64 / 3.0).sqrt();
            assert!((s.eval(t) - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(DitherSchedule::power_law(0.0, 0.5).is_err());
        assert!(DitherSchedule::power_law(1.0, 1.0).is_err());
        assert!(DitherSchedule::power_law(1.0, -0.1).is_err());
        assert!(DitherSchedule::power_law(f64::NAN, 0.5).is_err());
        assert!(DitherSchedule::constant(0.0).is_err());
        assert!(DitherSchedule::constant(f64::INFINITY).is_err());
        assert!(DitherSchedule::power_law(1.0, 0.0).is_ok());
    }

    #[test]
    fn f32_schedule() {
        let p = DitherSchedule::<f32>::power_law(2.0, 0.5).unwrap();
        assert_eq!(p.eval(9), 6.0);
    }

    proptest! {
        #[test]
        fn monotone_and_positive(h1 in 1e-3f64..1e3, alpha in 0.0f64..0.999, s in 1usize..1_000_000, d in 0usize..1_000_000) {
            let sched = DitherSchedule::power_law(h1, alpha).unwrap();
            let t = (s + d).min(1_000_000);
            prop_assert!(sched.eval(s) > 0.0);
            prop_assert!(sched.eval(s) <= sched.eval(t));
        }
    }
}
