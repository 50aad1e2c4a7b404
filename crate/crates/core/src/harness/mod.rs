//! Predictor-versus-sequence episodes and Monte Carlo regret estimation.
//!
//! Expected regret is taken over the forecaster's own randomization: the
//! sequence is fixed (or regenerated per trial by an adaptive adversary) and
//! trial `k` draws its dither from a stream seeded by
//! `derive_seed(master_seed, k)`. Trial outcomes are reduced in trial-index
//! order, so reports do not depend on the worker count.

mod quadrature;

pub use quadrature::{quadrature_expected_regret, quadrature_pick_probabilities};

use rayon::prelude::*;

use crate::adversary::AdversarySpec;
use crate::bounds;
use crate::error::{range_err, Error, Result};
use crate::loss::{LossSpec, Strategy};
use crate::predict::{Forecaster, PredictorConfig};
use crate::scalar::Scalar;
use crate::seq::{CountVector, StateSequence};
use crate::stream::derive_seed;

/// Outcome of one forecaster run over one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult<T> {
    /// `L̂_n`.
    pub cum_loss: T,
    pub per_step_losses: Vec<T>,
    /// `L*_n`.
    pub lstar: T,
    pub regret: T,
}

/// Best fixed strategy in hindsight for counts `N` and its cumulative loss.
///
/// Finite strategy spaces minimize `sum_x N(x) l(b, x)` (lowest index on
/// ties); log loss uses the empirical distribution with `0 ln 0 = 0`;
/// squared loss uses the empirical mean of the points.
pub fn best_fixed_from_counts<T: Scalar>(
    counts: &CountVector,
    loss: &LossSpec<T>,
) -> (Strategy<T>, T) {
    let w: Vec<T> = counts
        .counts()
        .iter()
        .map(|&n| T::from_f64(n as f64))
        .collect();
    match loss {
        LossSpec::Matrix { .. } | LossSpec::ZeroOne { .. } => {
            let b = loss.best_index(&w);
            (Strategy::Index(b), loss.weighted_loss(b, &w))
        }
        LossSpec::Log { .. } => {
            let n = T::from_f64(counts.total() as f64);
            let mut lstar = T::zero();
            for &c in &w {
                if c > T::zero() {
                    lstar += c * (n / c).ln();
                }
            }
            (loss.best_response(&w), lstar)
        }
        LossSpec::SquaredL2 { points } => {
            let b = loss.best_response(&w);
            let mean = b.values().expect("point strategy");
            let mut lstar = T::zero();
            for (&c, p) in w.iter().zip(points) {
                if c > T::zero() {
                    lstar += c * crate::loss::squared_distance(mean, p);
                }
            }
            (b, lstar)
        }
    }
}

/// `(argmin_b, min_b sum_t l(b, x_t))` over the whole sequence.
pub fn best_fixed_loss<T: Scalar>(
    seq: &StateSequence,
    loss: &LossSpec<T>,
) -> Result<(Strategy<T>, T)> {
    check_alphabet(seq, loss)?;
    let counts = seq.ingest(seq.len())?;
    Ok(best_fixed_from_counts(&counts, loss))
}

fn check_alphabet<T: Scalar>(seq: &StateSequence, loss: &LossSpec<T>) -> Result<()> {
    if seq.alphabet().size() != loss.alphabet_size() {
        return Err(Error::Dimension {
            what: "sequence alphabet",
            expected: loss.alphabet_size(),
            actual: seq.alphabet().size(),
        });
    }
    Ok(())
}

/// Runs `forecaster` over `seq`. The forecaster sees `x_1^{t-1}` before
/// emitting `b_t` (the clairvoyant predictor additionally sees `x_t`).
/// A `+inf` loss is recorded and the episode continues.
pub fn run_with_forecaster<T: Scalar>(
    forecaster: &mut Forecaster<T>,
    seq: &StateSequence,
    loss: &LossSpec<T>,
    mut on_step: impl FnMut(usize, &CountVector, T),
) -> Result<EpisodeResult<T>> {
    if seq.is_empty() {
        return Err(range_err("sequence length", 0, ">= 1"));
    }
    check_alphabet(seq, loss)?;
    let hindsight = forecaster.config().uses_hindsight();
    let finite = loss.is_finite_strategy();
    let mut counts = CountVector::zeros(seq.alphabet());
    let mut per_step_losses = Vec::with_capacity(seq.len());
    let mut cum_loss = T::zero();
    for (i, &x) in seq.states().iter().enumerate() {
        let t = i + 1;
        if hindsight {
            counts.push(x);
        }
        let step_loss = if finite {
            loss.entry(forecaster.predict_index(&counts, t, loss)?, x)
        } else {
            let b = forecaster.predict(&counts, t, loss)?;
            loss.eval_unchecked(&b, x)
        };
        if !hindsight {
            counts.push(x);
        }
        cum_loss += step_loss;
        per_step_losses.push(step_loss);
        on_step(t, &counts, cum_loss);
    }
    let (_, lstar) = best_fixed_from_counts(&counts, loss);
    Ok(EpisodeResult {
        cum_loss,
        per_step_losses,
        lstar,
        regret: cum_loss - lstar,
    })
}

/// One episode with a fresh forecaster seeded by `seed`.
pub fn run_episode<T: Scalar>(
    pred: &PredictorConfig<T>,
    seq: &StateSequence,
    loss: &LossSpec<T>,
    seed: u64,
) -> Result<EpisodeResult<T>> {
    let mut f = Forecaster::new(pred.clone(), loss, seed)?;
    run_with_forecaster(&mut f, seq, loss, |_, _, _| {})
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord<T> {
    pub trial: u64,
    pub seed: u64,
    pub cum_loss: T,
    pub lstar: T,
    pub regret: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport<T> {
    pub trials: usize,
    pub horizon: usize,
    pub mean_cum_loss: T,
    pub mean_regret: T,
    /// `1.96 * sample_std / sqrt(trials)`; zero for a single trial.
    pub ci95_halfwidth: T,
    pub max_regret: T,
    /// The matching closed-form regret bound, when one applies.
    pub bound_value: Option<T>,
    /// Mean of `L̂_t - L*_t` for `t = 1..=n`, when requested.
    pub per_t_mean_regret_curve: Option<Vec<T>>,
    pub records: Vec<TrialRecord<T>>,
}

impl<T: Scalar> RegretReport<T> {
    pub fn mean_normalized_regret(&self) -> T {
        self.mean_regret / T::from_usize(self.horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub regret_curve: bool,
}

impl MonteCarloOptions {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        MonteCarloOptions {
            trials,
            master_seed,
            threads: None,
            regret_curve: false,
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_curve(mut self) -> Self {
        self.regret_curve = true;
        self
    }
}

/// Mean, 95% half-width and max of a sample, reduced in the given order.
pub fn summarize<T: Scalar>(values: &[T]) -> (T, T, T) {
    let n = T::from_usize(values.len());
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / n;
    let max = values.iter().fold(T::neg_infinity(), |a, &v| a.max(v));
    if values.len() < 2 {
        return (mean, T::zero(), max);
    }
    if !mean.is_finite() {
        return (mean, T::infinity(), max);
    }
    let ss = values
        .iter()
        .fold(T::zero(), |a, &v| a + (v - mean) * (v - mean));
    let std = (ss / T::from_usize(values.len() - 1)).sqrt();
    (mean, T::from_f64(1.96) * std / n.sqrt(), max)
}

/// Estimates the expected regret of `pred` against `source`.
pub fn monte_carlo_regret<T: Scalar>(
    pred: &PredictorConfig<T>,
    source: &AdversarySpec<T>,
    loss: &LossSpec<T>,
    opts: MonteCarloOptions,
) -> Result<RegretReport<T>> {
    if opts.trials == 0 {
        return Err(range_err("trials", 0, ">= 1"));
    }
    pred.validate(loss)?;
    let fixed = if source.is_adaptive() {
        None
    } else {
        Some(source.generate(loss)?)
    };
    let run_trial = |k: usize| -> Result<(TrialRecord<T>, Option<Vec<T>>, usize)> {
        let seq = match &fixed {
            Some(s) => s.clone(),
            None => source.generate(loss)?,
        };
        let seed = derive_seed(opts.master_seed, k as u64);
        let mut f = Forecaster::new(pred.clone(), loss, seed)?;
        let mut curve = opts.regret_curve.then(|| Vec::with_capacity(seq.len()));
        let ep = run_with_forecaster(&mut f, &seq, loss, |_, counts, cum| {
            if let Some(c) = curve.as_mut() {
                c.push(cum - best_fixed_from_counts(counts, loss).1);
            }
        })?;
        Ok((
            TrialRecord {
                trial: k as u64,
                seed,
                cum_loss: ep.cum_loss,
                lstar: ep.lstar,
                regret: ep.regret,
            },
            curve,
            seq.len(),
        ))
    };
    let outcomes: Vec<_> = match opts.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..opts.trials)
                    .into_par_iter()
                    .map(run_trial)
                    .collect::<Result<_>>()
            })?
        }
        None => (0..opts.trials)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<_>>()?,
    };

    let horizon = outcomes[0].2;
    let regrets: Vec<T> = outcomes.iter().map(|o| o.0.regret).collect();
    let losses: Vec<T> = outcomes.iter().map(|o| o.0.cum_loss).collect();
    let (mean_regret, ci95_halfwidth, max_regret) = summarize(&regrets);
    let (mean_cum_loss, _, _) = summarize(&losses);
    let per_t_mean_regret_curve = opts.regret_curve.then(|| {
        let mut acc = vec![T::zero(); horizon];
        for (_, c, _) in &outcomes {
            for (a, &v) in acc.iter_mut().zip(c.as_deref().unwrap_or(&[])) {
                *a += v;
            }
        }
        let k = T::from_usize(opts.trials);
        acc.into_iter().map(|a| a / k).collect()
    });
    Ok(RegretReport {
        trials: opts.trials,
        horizon,
        mean_cum_loss,
        mean_regret,
        ci95_halfwidth,
        max_regret,
        bound_value: bounds::regret_bound_for(pred, loss, horizon),
        per_t_mean_regret_curve,
        records: outcomes.into_iter().map(|o| o.0).collect(),
    })
}
