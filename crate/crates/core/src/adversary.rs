//! Sequence generators: fixed, i.i.d., round-robin, and the adaptive
//! adversary that plays against a deterministic forecaster.

use crate::error::{range_err, Error, Result};
use crate::loss::LossSpec;
use crate::predict::{fl_step, PredictorConfig};
use crate::scalar::Scalar;
use crate::schedule::DitherSchedule;
use crate::seq::{Alphabet, CountVector, StateSequence};
use crate::stream::RandomStream;

#[derive(Debug, Clone, PartialEq)]
pub enum AdversarySpec<T> {
    Fixed(StateSequence),
    Iid {
        probs: Vec<T>,
        n: usize,
        seed: u64,
    },
    RoundRobin {
        m: usize,
        n: usize,
    },
    /// Plays the opposite of a deterministic forecaster's next decision.
    AntiDeterministic {
        target: PredictorConfig<T>,
        n: usize,
    },
}

impl<T: Scalar> AdversarySpec<T> {
    /// Adaptive adversaries depend on forecaster decisions and are
    /// regenerated for every trial.
    pub fn is_adaptive(&self) -> bool {
        matches!(self, AdversarySpec::AntiDeterministic { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AdversarySpec::Fixed(_) => "fixed",
            AdversarySpec::Iid { .. } => "iid",
            AdversarySpec::RoundRobin { .. } => "round_robin",
            AdversarySpec::AntiDeterministic { .. } => "anti_deterministic",
        }
    }

    pub fn generate(&self, loss: &LossSpec<T>) -> Result<StateSequence> {
        match self {
            AdversarySpec::Fixed(seq) => Ok(seq.clone()),
            AdversarySpec::Iid { probs, n, seed } => iid_sequence(probs, *n, *seed),
            AdversarySpec::RoundRobin { m, n } => round_robin(*m, *n),
            AdversarySpec::AntiDeterministic { target, n } => anti_deterministic(target, loss, *n),
        }
    }
}

/// `x_t = (t - 1) mod m`, so that `N_{t-1}(x_t) = floor((t - 1) / m)`.
pub fn round_robin(m: usize, n: usize) -> Result<StateSequence> {
    let alphabet = Alphabet::new(m)?;
    if n == 0 {
        return Err(range_err("sequence length", n, ">= 1"));
    }
    StateSequence::new((0..n).map(|i| i % m).collect(), alphabet)
}

/// `n` i.i.d. draws from `probs`, reproducible from `seed`.
pub fn iid_sequence<T: Scalar>(probs: &[T], n: usize, seed: u64) -> Result<StateSequence> {
    let alphabet = Alphabet::new(probs.len())?;
    if probs.iter().any(|&p| !p.is_finite() || p < T::zero()) {
        return Err(Error::InvalidLoss(
            "i.i.d. probabilities must be finite and nonnegative".into(),
        ));
    }
    let total: T = probs.iter().copied().sum();
    if (total - T::one()).abs() > T::from_f64(1e-9) {
        return Err(range_err("probability sum", total, "1 +/- 1e-9"));
    }
    let mut stream = RandomStream::new(seed);
    let last = probs.len() - 1;
    let states = (0..n)
        .map(|_| {
            let u: T = stream.uniform();
            let mut acc = T::zero();
            for (x, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return x;
                }
            }
            last
        })
        .collect();
    StateSequence::new(states, alphabet)
}

/// Simulates a deterministic target causally and sets `x_t = 1 - b_t`.
///
/// Only binary 0-1 loss and deterministic targets (follow-the-leader or a
/// fixed row) are supported; the target's cumulative loss is exactly `n`.
pub fn anti_deterministic<T: Scalar>(
    target: &PredictorConfig<T>,
    loss: &LossSpec<T>,
    n: usize,
) -> Result<StateSequence> {
    if !matches!(loss, LossSpec::ZeroOne { m: 2 }) {
        return Err(Error::Unsupported(format!(
            "anti-deterministic adversary needs binary 0-1 loss, got a {} loss over {} states",
            loss.name(),
            loss.alphabet_size()
        )));
    }
    if n == 0 {
        return Err(range_err("sequence length", n, ">= 1"));
    }
    let alphabet = Alphabet::binary();
    let mut counts = CountVector::zeros(alphabet);
    let mut states = Vec::with_capacity(n);
    for t in 1..=n {
        let b = match target {
            PredictorConfig::FollowLeader => fl_step(&counts, t, loss)?
                .index()
                .expect("0-1 loss yields index strategies"),
            PredictorConfig::Fixed { strategy } if *strategy < 2 => *strategy,
            PredictorConfig::Fixed { strategy } => {
                return Err(range_err("fixed strategy", strategy, "0..2"))
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "anti-deterministic adversary needs a deterministic target, got {}",
                    other.name()
                )))
            }
        };
        let x = 1 - b;
        states.push(x);
        counts.push(x);
    }
    StateSequence::new(states, alphabet)
}

/// `sum_t 1 / (N_{t-1}(x_t) + h_t)`, the sequence-dependent term of the
/// log-loss regret bound.
pub fn second_sum_value<T: Scalar>(seq: &StateSequence, schedule: &DitherSchedule<T>) -> T {
    let mut counts = vec![0u64; seq.alphabet().size()];
    let mut acc = T::zero();
    for (i, &x) in seq.states().iter().enumerate() {
        acc += T::one() / (T::from_f64(counts[x] as f64) + schedule.eval(i + 1));
        counts[x] += 1;
    }
    acc
}
