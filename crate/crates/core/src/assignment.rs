//! Sequential probability assignments over the alphabet.
//!
//! All functions take the counts `N_{t-1}` of the history seen before time
//! `t` and return a distribution for `x_t`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::schedule::DitherSchedule;
use crate::seq::CountVector;

/// One realization of the perturbed-frequency assignment.
///
/// `raw_weights[x] = N_{t-1}(x) + h_t u_t(x)` and
/// `normalizer = t - 1 + h_t * sum(u_t)`, so `probs[x] = raw_weights[x] / normalizer`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedDistribution<T> {
    pub probs: Vec<T>,
    pub raw_weights: Vec<T>,
    pub normalizer: T,
}

impl<T: Scalar> PerturbedDistribution<T> {
    /// Scales the dithered weights by `c > 0`; the probabilities are unchanged.
    pub fn scaled_weights(&self, c: T) -> Vec<T> {
        self.raw_weights.iter().map(|&w| w * c).collect()
    }
}

fn check_history(counts: &CountVector, t: usize) -> Result<()> {
    if t == 0 {
        return Err(crate::error::range_err("time index", t, ">= 1"));
    }
    counts.expect_total(t as u64 - 1)
}

/// Writes `N(x) + h u(x)` into `raw` and returns `(t - 1) + h * sum(u)`.
///
/// Allocation-free core of [`perturbed_assignment`], used on hot paths.
pub fn dithered_weights_into<T: Scalar>(counts: &CountVector, h: T, u: &[T], raw: &mut [T]) -> T {
    let mut dither_sum = T::zero();
    for ((w, &n), &ux) in raw.iter_mut().zip(counts.counts()).zip(u) {
        *w = T::from_f64(n as f64) + h * ux;
        dither_sum += ux;
    }
    T::from_f64(counts.total() as f64) + h * dither_sum
}

pub fn perturbed_assignment<T: Scalar>(
    counts: &CountVector,
    t: usize,
    schedule: &DitherSchedule<T>,
    u: &[T],
) -> Result<PerturbedDistribution<T>> {
    check_history(counts, t)?;
    if u.len() != counts.size() {
        return Err(Error::Dimension {
            what: "dither vector",
            expected: counts.size(),
            actual: u.len(),
        });
    }
    let h = schedule.eval(t);
    let mut raw_weights = vec![T::zero(); u.len()];
    let normalizer = dithered_weights_into(counts, h, u, &mut raw_weights);
    let probs = raw_weights.iter().map(|&w| w / normalizer).collect();
    Ok(PerturbedDistribution {
        probs,
        raw_weights,
        normalizer,
    })
}

/// Add-one rule: `(N(x) + 1) / (t - 1 + m)`.
pub fn laplace_assignment<T: Scalar>(counts: &CountVector, t: usize) -> Result<Vec<T>> {
    add_constant(counts, t, T::one())
}

/// Add-half (Krichevsky-Trofimov) rule: `(N(x) + 1/2) / (t - 1 + m/2)`.
pub fn kt_assignment<T: Scalar>(counts: &CountVector, t: usize) -> Result<Vec<T>> {
    add_constant(counts, t, T::half())
}

fn add_constant<T: Scalar>(counts: &CountVector, t: usize, a: T) -> Result<Vec<T>> {
    check_history(counts, t)?;
    let denom = T::from_f64(counts.total() as f64) + a * T::from_usize(counts.size());
    Ok(counts
        .counts()
        .iter()
        .map(|&n| (T::from_f64(n as f64) + a) / denom)
        .collect())
}

/// Plain frequencies `N(x) / (t - 1)`; undefined at `t = 1`.
pub fn empirical_assignment<T: Scalar>(counts: &CountVector, t: usize) -> Result<Vec<T>> {
    check_history(counts, t)?;
    if t == 1 {
        return Err(Error::UndefinedHistory);
    }
    let denom = T::from_f64(counts.total() as f64);
    Ok(counts
        .counts()
        .iter()
        .map(|&n| T::from_f64(n as f64) / denom)
        .collect())
}
