//! Closed-form regret bounds for FPF, the log-loss variance bound behind
//! the almost-sure argument, and the type-class inequality.
//!
//! Every bound is an exact finite sum. The integral relaxations of those
//! sums are exposed separately so that tests can check they really are
//! upper bounds.

use serde::{Deserialize, Serialize};

use crate::error::{range_err, Error, Result};
use crate::loss::{LossBound, LossSpec};
use crate::predict::{Forecaster, PredictorConfig};
use crate::scalar::Scalar;
use crate::schedule::DitherSchedule;
use crate::seq::{CountVector, StateSequence};
use crate::stream::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `2R sum_t 1/h_t + 2R m h_n` for any schedule.
    BoundedLoss,
    /// `n * 4R sqrt(2m/n)` for `h_t = sqrt(2t/m)`.
    BoundedLossSqrt,
    /// `sum_t (m h_t - 1)/t + sum_t 1/(floor((t-1)/m) + h_t)`.
    LogLossRaw,
    /// The log-loss sum with `h = 1/m`, reported with the `m ln n` cap.
    LogLossConstH,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::BoundedLoss => "bounded_loss",
            Theorem::BoundedLossSqrt => "bounded_loss_sqrt",
            Theorem::LogLossRaw => "log_loss_raw",
            Theorem::LogLossConstH => "log_loss_const_h",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery<T> {
    pub theorem: Theorem,
    pub n: usize,
    pub m: usize,
    /// Loss bound `R`; ignored by the log-loss variants.
    pub r: Option<T>,
    /// Ignored by `BoundedLossSqrt` and `LogLossConstH`, which fix their own.
    pub schedule: DitherSchedule<T>,
}

impl<T: Scalar> BoundQuery<T> {
    /// The schedule the bound is actually evaluated with.
    pub fn effective_schedule(&self) -> DitherSchedule<T> {
        match self.theorem {
            Theorem::BoundedLossSqrt => DitherSchedule::sqrt_optimal(self.m),
            Theorem::LogLossConstH => DitherSchedule::Constant {
                h: T::one() / T::from_usize(self.m),
            },
            _ => self.schedule,
        }
    }

    pub fn evaluate(&self) -> Result<T> {
        if self.n == 0 {
            return Err(range_err("n", 0, ">= 1"));
        }
        crate::seq::Alphabet::new(self.m)?;
        let schedule = self.effective_schedule().validated()?;
        match self.theorem {
            Theorem::BoundedLoss | Theorem::BoundedLossSqrt => {
                let r = self
                    .r
                    .filter(|r| r.is_finite() && *r >= T::zero())
                    .ok_or_else(|| {
                        Error::Unsupported("bounded-loss bounds need a finite R >= 0".into())
                    })?;
                Ok(if self.theorem == Theorem::BoundedLoss {
                    bounded_loss_bound(self.n, self.m, r, &schedule)
                } else {
                    T::from_usize(self.n) * sqrt_schedule_normalized_bound(r, self.m, self.n)
                })
            }
            Theorem::LogLossRaw | Theorem::LogLossConstH => {
                Ok(log_loss_bound(self.n, self.m, &schedule))
            }
        }
    }

    /// The `m ln n` cap reported alongside `LogLossConstH`.
    pub fn cap(&self) -> Option<T> {
        (self.theorem == Theorem::LogLossConstH).then(|| log_loss_const_cap(self.m, self.n))
    }
}

/// `2R (sum_{t=1}^n 1/h_t + m h_n)`.
pub fn bounded_loss_bound<T: Scalar>(n: usize, m: usize, r: T, schedule: &DitherSchedule<T>) -> T {
    let inv_sum = (1..=n).fold(T::zero(), |acc, t| acc + T::one() / schedule.eval(t));
    T::two() * r * (inv_sum + T::from_usize(m) * schedule.eval(n))
}

/// `4R sqrt(2m/n)`: normalized bound for `h_t = sqrt(2t/m)`.
pub fn sqrt_schedule_normalized_bound<T: Scalar>(r: T, m: usize, n: usize) -> T {
    T::from_f64(4.0) * r * (T::two() * T::from_usize(m) / T::from_usize(n)).sqrt()
}

/// Integral relaxation of [`bounded_loss_bound`] for `h_t = h1 t^alpha`:
/// `2R (n^{1-alpha} / (h1 (1-alpha)) + m h1 n^alpha)`.
pub fn power_law_relaxed_bound<T: Scalar>(n: usize, m: usize, r: T, h1: T, alpha: T) -> T {
    let nf = T::from_usize(n);
    T::two()
        * r
        * (nf.powf(T::one() - alpha) / (h1 * (T::one() - alpha))
            + T::from_usize(m) * h1 * nf.powf(alpha))
}

/// `sum_t (m h_t - 1)/t + sum_t 1/(floor((t-1)/m) + h_t)`.
pub fn log_loss_bound<T: Scalar>(n: usize, m: usize, schedule: &DitherSchedule<T>) -> T {
    let mf = T::from_usize(m);
    (1..=n).fold(T::zero(), |acc, t| {
        let h = schedule.eval(t);
        let first = (mf * h - T::one()) / T::from_usize(t);
        let second = T::one() / (T::from_usize((t - 1) / m) + h);
        acc + first + second
    })
}

/// `m ln n`.
pub fn log_loss_const_cap<T: Scalar>(m: usize, n: usize) -> T {
    T::from_usize(m) * T::from_usize(n).ln()
}

/// `8 + 4 ln^2((t - 1)/h_t + m)`: bound on the variance of the step log loss.
pub fn variance_bound<T: Scalar>(t: usize, schedule: &DitherSchedule<T>, m: usize) -> T {
    let a = T::from_usize(t - 1) / schedule.eval(t) + T::from_usize(m);
    let l = a.ln();
    T::from_f64(8.0) + T::from_f64(4.0) * l * l
}

/// `sum_{t<=n} variance_bound(t) / t^2`.
pub fn kolmogorov_partial_sum<T: Scalar>(schedule: &DitherSchedule<T>, m: usize, n: usize) -> T {
    (1..=n).fold(T::zero(), |acc, t| {
        let tf = T::from_usize(t);
        acc + variance_bound(t, schedule, m) / (tf * tf)
    })
}

/// Sample statistics of the step log loss `ln(1 / P_t(x_t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepVariance<T> {
    pub mean: T,
    pub variance: T,
    /// Standard error of the sample variance (fourth-moment estimate).
    pub std_error: T,
    pub trials: usize,
}

/// Estimates `Var[ln(1 / P_t(x_t))]` for an FPF log-loss forecaster.
///
/// Only step `t`'s dither matters, so each trial draws one dither vector
/// from the stream seeded by `derive_seed(seed, k)`.
pub fn empirical_step_variance<T: Scalar>(
    pred: &PredictorConfig<T>,
    seq: &StateSequence,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<StepVariance<T>> {
    let PredictorConfig::Fpf { schedule, dither } = pred else {
        return Err(Error::Unsupported(format!(
            "step variance needs FPF, got {}",
            pred.name()
        )));
    };
    if t == 0 || t > seq.len() {
        return Err(range_err("t", t, format!("1..={}", seq.len())));
    }
    if trials < 2 {
        return Err(range_err("trials", trials, ">= 2"));
    }
    let loss = LossSpec::log(seq.alphabet().size())?;
    let counts = seq.ingest(t - 1)?;
    let x = seq.at(t);
    let samples: Vec<T> = (0..trials)
        .map(|k| {
            let mut f = Forecaster::new(pred.clone(), &loss, derive_seed(seed, k as u64))?;
            let (_, d) = f.fpf_step_with_distribution(schedule, *dither, &counts, t, &loss)?;
            Ok(-d.probs[x].ln())
        })
        .collect::<Result<_>>()?;
    let nf = T::from_usize(trials);
    let mean = samples.iter().fold(T::zero(), |a, &v| a + v) / nf;
    let (m2, m4) = samples.iter().fold((T::zero(), T::zero()), |(a2, a4), &v| {
        let d = v - mean;
        (a2 + d * d, a4 + d * d * d * d)
    });
    let variance = m2 / T::from_usize(trials - 1);
    let mu4 = m4 / nf;
    let ratio = T::from_usize(trials.saturating_sub(3)) / T::from_usize(trials - 1);
    let se2 = ((mu4 - variance * variance * ratio) / nf).max(T::zero());
    Ok(StepVariance {
        mean,
        variance,
        std_error: se2.sqrt(),
        trials,
    })
}

/// Both sides of `ln(n! / prod_x N(x)!) <= sum_x N(x) ln(n / N(x))`.
pub fn type_class_check<T: Scalar>(counts: &CountVector) -> Result<(T, T)> {
    let n = counts.total();
    if n > 170 {
        return Err(range_err("count total", n, "<= 170"));
    }
    let log_factorial = |k: u64| (1..=k).fold(T::zero(), |acc, i| acc + T::from_f64(i as f64).ln());
    let lhs = counts
        .counts()
        .iter()
        .fold(log_factorial(n), |acc, &c| acc - log_factorial(c));
    let nf = T::from_f64(n as f64);
    let rhs = counts.counts().iter().fold(T::zero(), |acc, &c| {
        if c == 0 {
            acc
        } else {
            let cf = T::from_f64(c as f64);
            acc + cf * (nf / cf).ln()
        }
    });
    Ok((lhs, rhs))
}

/// The bound matching a forecaster/loss pair, if one applies.
pub fn regret_bound_for<T: Scalar>(
    pred: &PredictorConfig<T>,
    loss: &LossSpec<T>,
    n: usize,
) -> Option<T> {
    let schedule = match pred {
        PredictorConfig::Fpf { schedule, .. } | PredictorConfig::SmoothedFpf { schedule, .. } => {
            schedule
        }
        _ => return None,
    };
    let m = loss.alphabet_size();
    match loss.bound() {
        LossBound::Finite(r) => Some(bounded_loss_bound(n, m, r, schedule)),
        LossBound::Unbounded => Some(log_loss_bound(n, m, schedule)),
    }
}
