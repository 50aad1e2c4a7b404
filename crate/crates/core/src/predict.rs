//! Forecasters: perturbed-frequency (FPF) and its smoothed variant, the
//! follow-the-leader and perturbed-leader baselines, fixed strategies, and
//! the clairvoyant predictor used as a proof oracle.
//!
//! Every argmin over a finite strategy set breaks ties toward the lowest
//! strategy index.

use serde::{Deserialize, Serialize};

use crate::assignment::{dithered_weights_into, perturbed_assignment, PerturbedDistribution};
use crate::error::{range_err, Error, Result};
use crate::loss::{LossSpec, Strategy};
use crate::scalar::Scalar;
use crate::schedule::DitherSchedule;
use crate::seq::CountVector;
use crate::stream::RandomStream;

pub const DEFAULT_INNER_SAMPLES: usize = 256;

/// How the dither vector `u_t` evolves over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DitherMode {
    /// Fresh `u_t` at every step.
    #[default]
    Iid,
    /// `u_t = u_1` for all `t`.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictorConfig<T> {
    Fpf {
        schedule: DitherSchedule<T>,
        #[serde(default)]
        dither: DitherMode,
    },
    FollowLeader,
    /// Perturbed leader: each strategy's cumulative loss is reduced by
    /// `scale_t * u(b)` with `u(b)` uniform.
    Fpl {
        scale: DitherSchedule<T>,
    },
    /// Sees `x_t` before acting; shared dither.
    Clairvoyant {
        schedule: DitherSchedule<T>,
    },
    /// Plays the average of `inner_samples` FPF decisions (convex losses only).
    SmoothedFpf {
        schedule: DitherSchedule<T>,
        #[serde(default = "default_inner_samples")]
        inner_samples: usize,
    },
    /// Always plays the same row.
    Fixed {
        strategy: usize,
    },
}

fn default_inner_samples() -> usize {
    DEFAULT_INNER_SAMPLES
}

impl<T: Scalar> PredictorConfig<T> {
    pub fn fpf(schedule: DitherSchedule<T>) -> Self {
        PredictorConfig::Fpf {
            schedule,
            dither: DitherMode::Iid,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PredictorConfig::Fpf { .. } => "fpf",
            PredictorConfig::FollowLeader => "follow_leader",
            PredictorConfig::Fpl { .. } => "fpl",
            PredictorConfig::Clairvoyant { .. } => "clairvoyant",
            PredictorConfig::SmoothedFpf { .. } => "smoothed_fpf",
            PredictorConfig::Fixed { .. } => "fixed",
        }
    }

    pub fn schedule(&self) -> Option<&DitherSchedule<T>> {
        match self {
            PredictorConfig::Fpf { schedule, .. }
            | PredictorConfig::Clairvoyant { schedule }
            | PredictorConfig::SmoothedFpf { schedule, .. } => Some(schedule),
            PredictorConfig::Fpl { scale } => Some(scale),
            _ => None,
        }
    }

    /// Whether decisions depend on the random stream. The smoothed variant
    /// counts as randomized: it is deterministic only given its stream.
    pub fn is_randomized(&self) -> bool {
        !matches!(
            self,
            PredictorConfig::FollowLeader | PredictorConfig::Fixed { .. }
        )
    }

    /// Whether the harness must reveal `x_t` before asking for `b_t`.
    pub fn uses_hindsight(&self) -> bool {
        matches!(self, PredictorConfig::Clairvoyant { .. })
    }

    /// Structural checks of the configuration against a loss.
    pub fn validate(&self, loss: &LossSpec<T>) -> Result<()> {
        if let Some(s) = self.schedule() {
            s.validated()?;
        }
        match self {
            PredictorConfig::Fpl { .. } if !loss.is_finite_strategy() => {
                Err(Error::Unsupported(format!(
                    "perturbed leader needs a finite strategy space, got a {} loss",
                    loss.name()
                )))
            }
            PredictorConfig::SmoothedFpf { .. } if !matches!(loss, LossSpec::SquaredL2 { .. }) => {
                Err(Error::Unsupported(format!(
                    "smoothed FPF needs a convex squared-L2 loss, got a {} loss",
                    loss.name()
                )))
            }
            PredictorConfig::SmoothedFpf {
                inner_samples: 0, ..
            } => Err(range_err("inner_samples", 0, ">= 1")),
            PredictorConfig::Fixed { strategy } => match loss.num_strategies() {
                Some(nb) if *strategy < nb => Ok(()),
                Some(nb) => Err(range_err("fixed strategy", strategy, format!("0..{nb}"))),
                None => Err(Error::Unsupported(format!(
                    "fixed strategies need a finite strategy space, got a {} loss",
                    loss.name()
                ))),
            },
            _ => Ok(()),
        }
    }

    /// Whether the schedule satisfies the growth condition under which the
    /// forecaster is Hannan consistent for this loss: `alpha` in `[0, 1)` for
    /// log loss and `alpha` in `(0, 1)` for bounded losses.
    pub fn hannan_consistent_for(&self, loss: &LossSpec<T>) -> bool {
        let schedule = match self {
            PredictorConfig::Fpf { schedule, .. }
            | PredictorConfig::SmoothedFpf { schedule, .. } => schedule,
            _ => return false,
        };
        if schedule.validated().is_err() {
            return false;
        }
        match loss {
            LossSpec::Log { .. } => true,
            _ => schedule.alpha() > T::zero(),
        }
    }
}

fn counts_as_weights<T: Scalar>(counts: &CountVector, out: &mut [T]) {
    for (w, &n) in out.iter_mut().zip(counts.counts()) {
        *w = T::from_f64(n as f64);
    }
}

/// The expected-loss minimizer under a perturbed assignment.
///
/// Log loss returns the assignment itself; squared loss returns the
/// probability-weighted mean of the points; finite strategy spaces minimize
/// the dithered cumulative loss `sum_x Ñ(x) l(b, x)`.
pub fn fpf_decision<T: Scalar>(loss: &LossSpec<T>, dist: &PerturbedDistribution<T>) -> Strategy<T> {
    match loss {
        LossSpec::Log { .. } => Strategy::Distribution(dist.probs.clone()),
        LossSpec::SquaredL2 { .. } => {
            Strategy::Point(loss.mean_point(&dist.probs).expect("squared loss"))
        }
        _ => Strategy::Index(loss.best_index(&dist.raw_weights)),
    }
}

/// Follow the leader; the empty history yields the tie-break strategy.
pub fn fl_step<T: Scalar>(
    counts: &CountVector,
    t: usize,
    loss: &LossSpec<T>,
) -> Result<Strategy<T>> {
    check_history(counts, t, loss)?;
    let mut w = vec![T::zero(); counts.size()];
    counts_as_weights(counts, &mut w);
    Ok(loss.best_response(&w))
}

/// Best response to the hindsight counts `N_t(x) + h_t u(x)`, where the
/// counts already include `x_t`.
pub fn clairvoyant_step<T: Scalar>(
    schedule: &DitherSchedule<T>,
    counts_including_current: &CountVector,
    t: usize,
    loss: &LossSpec<T>,
    shared_u: &[T],
) -> Result<Strategy<T>> {
    if t == 0 {
        return Err(range_err("time index", t, ">= 1"));
    }
    counts_including_current.expect_total(t as u64)?;
    check_dims(counts_including_current, loss)?;
    if shared_u.len() != counts_including_current.size() {
        return Err(Error::Dimension {
            what: "dither vector",
            expected: counts_including_current.size(),
            actual: shared_u.len(),
        });
    }
    let h = schedule.eval(t);
    let w: Vec<T> = counts_including_current
        .counts()
        .iter()
        .zip(shared_u)
        .map(|(&n, &u)| T::from_f64(n as f64) + h * u)
        .collect();
    Ok(loss.best_response(&w))
}

/// Perturbed leader over a finite strategy set:
/// `argmin_b [ sum_{i<t} l(b, x_i) - scale * u(b) ]`. Draws `|B|` uniforms.
pub fn fpl_step<T: Scalar>(
    counts: &CountVector,
    t: usize,
    loss: &LossSpec<T>,
    stream: &mut RandomStream,
    scale: T,
) -> Result<usize> {
    check_history(counts, t, loss)?;
    let nb = loss.num_strategies().ok_or_else(|| {
        Error::Unsupported(format!(
            "perturbed leader needs a finite strategy space, got a {} loss",
            loss.name()
        ))
    })?;
    let mut w = vec![T::zero(); counts.size()];
    counts_as_weights(counts, &mut w);
    let mut best = 0;
    let mut best_val = T::infinity();
    for b in 0..nb {
        let v = loss.weighted_loss(b, &w) - scale * stream.uniform::<T>();
        if v < best_val {
            best = b;
            best_val = v;
        }
    }
    Ok(best)
}

fn check_dims<T: Scalar>(counts: &CountVector, loss: &LossSpec<T>) -> Result<()> {
    if counts.size() != loss.alphabet_size() {
        return Err(Error::Dimension {
            what: "count vector",
            expected: loss.alphabet_size(),
            actual: counts.size(),
        });
    }
    Ok(())
}

fn check_history<T: Scalar>(counts: &CountVector, t: usize, loss: &LossSpec<T>) -> Result<()> {
    if t == 0 {
        return Err(range_err("time index", t, ">= 1"));
    }
    counts.expect_total(t as u64 - 1)?;
    check_dims(counts, loss)
}

/// A stateful forecaster: a configuration plus its random stream.
#[derive(Debug, Clone)]
pub struct Forecaster<T> {
    cfg: PredictorConfig<T>,
    stream: RandomStream,
    shared_u: Option<Vec<T>>,
    u_buf: Vec<T>,
    w_buf: Vec<T>,
}

impl<T: Scalar> Forecaster<T> {
    pub fn new(cfg: PredictorConfig<T>, loss: &LossSpec<T>, seed: u64) -> Result<Self> {
        cfg.validate(loss)?;
        let m = loss.alphabet_size();
        Ok(Forecaster {
            cfg,
            stream: RandomStream::new(seed),
            shared_u: None,
            u_buf: vec![T::zero(); m],
            w_buf: vec![T::zero(); m],
        })
    }

    pub fn config(&self) -> &PredictorConfig<T> {
        &self.cfg
    }

    pub fn stream_mut(&mut self) -> &mut RandomStream {
        &mut self.stream
    }

    /// The dither vector for step `t` under the given mode.
    fn dither(&mut self, mode: DitherMode) -> Vec<T> {
        match mode {
            DitherMode::Iid => self.stream.draw_dither(self.u_buf.len()),
            DitherMode::Shared => {
                let m = self.u_buf.len();
                let stream = &mut self.stream;
                self.shared_u
                    .get_or_insert_with(|| stream.draw_dither(m))
                    .clone()
            }
        }
    }

    fn dither_into_buf(&mut self, mode: DitherMode) {
        match mode {
            DitherMode::Iid => self.stream.fill_dither(&mut self.u_buf),
            DitherMode::Shared => {
                if self.shared_u.is_none() {
                    self.shared_u = Some(self.stream.draw_dither(self.u_buf.len()));
                }
                self.u_buf
                    .copy_from_slice(self.shared_u.as_deref().expect("initialized above"));
            }
        }
    }

    /// Draws a dither, forms the perturbed assignment and returns it with
    /// the decision it induces.
    pub fn fpf_step_with_distribution(
        &mut self,
        schedule: &DitherSchedule<T>,
        mode: DitherMode,
        counts: &CountVector,
        t: usize,
        loss: &LossSpec<T>,
    ) -> Result<(Strategy<T>, PerturbedDistribution<T>)> {
        check_history(counts, t, loss)?;
        let u = self.dither(mode);
        let dist = perturbed_assignment(counts, t, schedule, &u)?;
        Ok((fpf_decision(loss, &dist), dist))
    }

    pub fn fpf_step(
        &mut self,
        schedule: &DitherSchedule<T>,
        mode: DitherMode,
        counts: &CountVector,
        t: usize,
        loss: &LossSpec<T>,
    ) -> Result<Strategy<T>> {
        Ok(self
            .fpf_step_with_distribution(schedule, mode, counts, t, loss)?
            .0)
    }

    /// Average of `inner_samples` independent FPF decisions.
    pub fn smoothed_fpf_step(
        &mut self,
        schedule: &DitherSchedule<T>,
        inner_samples: usize,
        counts: &CountVector,
        t: usize,
        loss: &LossSpec<T>,
    ) -> Result<Strategy<T>> {
        let LossSpec::SquaredL2 { points } = loss else {
            return Err(Error::Unsupported(format!(
                "smoothed FPF needs a convex squared-L2 loss, got a {} loss",
                loss.name()
            )));
        };
        if inner_samples == 0 {
            return Err(range_err("inner_samples", 0, ">= 1"));
        }
        let mut acc = vec![T::zero(); points[0].len()];
        for _ in 0..inner_samples {
            let b = self.fpf_step(schedule, DitherMode::Iid, counts, t, loss)?;
            for (a, &v) in acc.iter_mut().zip(b.values().expect("point strategy")) {
                *a += v;
            }
        }
        let k = T::from_usize(inner_samples);
        Ok(Strategy::Point(acc.into_iter().map(|a| a / k).collect()))
    }

    /// Decision for time `t`. `counts` holds `N_{t-1}`, or `N_t` for the
    /// clairvoyant predictor.
    pub fn predict(
        &mut self,
        counts: &CountVector,
        t: usize,
        loss: &LossSpec<T>,
    ) -> Result<Strategy<T>> {
        match self.cfg.clone() {
            PredictorConfig::Fpf { schedule, dither } => {
                self.fpf_step(&schedule, dither, counts, t, loss)
            }
            PredictorConfig::FollowLeader => fl_step(counts, t, loss),
            PredictorConfig::Fpl { scale } => {
                let s = scale.eval(t);
                fpl_step(counts, t, loss, &mut self.stream, s).map(Strategy::Index)
            }
            PredictorConfig::Clairvoyant { schedule } => {
                let u = self.dither(DitherMode::Shared);
                clairvoyant_step(&schedule, counts, t, loss, &u)
            }
            PredictorConfig::SmoothedFpf {
                schedule,
                inner_samples,
            } => self.smoothed_fpf_step(&schedule, inner_samples, counts, t, loss),
            PredictorConfig::Fixed { strategy } => {
                check_history(counts, t, loss)?;
                Ok(Strategy::Index(strategy))
            }
        }
    }

    /// Allocation-free decision for finite strategy spaces. Consumes the
    /// stream exactly like [`Forecaster::predict`] and returns the same row.
    pub fn predict_index(
        &mut self,
        counts: &CountVector,
        t: usize,
        loss: &LossSpec<T>,
    ) -> Result<usize> {
        if !loss.is_finite_strategy() {
            return Err(Error::Unsupported(format!(
                "index prediction on a {} loss",
                loss.name()
            )));
        }
        match &self.cfg {
            PredictorConfig::Fpf { schedule, dither } => {
                let (schedule, dither) = (*schedule, *dither);
                check_history(counts, t, loss)?;
                self.dither_into_buf(dither);
                dithered_weights_into(counts, schedule.eval(t), &self.u_buf, &mut self.w_buf);
                Ok(loss.best_index(&self.w_buf))
            }
            PredictorConfig::Clairvoyant { schedule } => {
                let schedule = *schedule;
                counts.expect_total(t as u64)?;
                self.dither_into_buf(DitherMode::Shared);
                let h = schedule.eval(t);
                for ((w, &n), &u) in self.w_buf.iter_mut().zip(counts.counts()).zip(&self.u_buf) {
                    *w = T::from_f64(n as f64) + h * u;
                }
                Ok(loss.best_index(&self.w_buf))
            }
            _ => self
                .predict(counts, t, loss)?
                .index()
                .ok_or_else(|| Error::Unsupported("non-index strategy".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::Strategy;
    use proptest::prelude::*;

    fn cv(c: &[u64]) -> CountVector {
        CountVector::from_counts(c.to_vec()).unwrap()
    }

    fn dist(probs: &[f64]) -> PerturbedDistribution<f64> {
        PerturbedDistribution {
            probs: probs.to_vec(),
            raw_weights: probs.to_vec(),
            normalizer: 1.0,
        }
    }

    #[test]
    fn fpf_decision_examples() {
        let z = LossSpec::zero_one(2).unwrap();
        assert_eq!(fpf_decision(&z, &dist(&[0.7, 0.3])), Strategy::Index(0));
        let l = LossSpec::log(2).unwrap();
        let d = dist(&[0.3125, 0.6875]);
        assert_eq!(
            fpf_decision(&l, &d),
            Strategy::Distribution(d.probs.clone())
        );
        let sq = LossSpec::<f64>::squared_l2(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            fpf_decision(&sq, &dist(&[0.25, 0.75])),
            Strategy::Point(vec![0.75, 0.0])
        );
    }

    #[test]
    fn fpf_log_returns_the_assignment_bitwise() {
        let l = LossSpec::<f64>::log(3).unwrap();
        let sched = DitherSchedule::power_law(1.0, 0.5).unwrap();
        let mut f = Forecaster::new(PredictorConfig::fpf(sched), &l, 5).unwrap();
        let counts = cv(&[4, 0, 2]);
        let (b, d) = f
            .fpf_step_with_distribution(&sched, DitherMode::Iid, &counts, 7, &l)
            .unwrap();
        let Strategy::Distribution(q) = b else {
            panic!()
        };
        for (a, p) in q.iter().zip(&d.probs) {
            assert_eq!(a.to_bits(), p.to_bits());
        }
    }

    #[test]
    fn fl_examples() {
        let z = LossSpec::<f64>::zero_one(2).unwrap();
        assert_eq!(fl_step(&cv(&[2, 1]), 4, &z).unwrap(), Strategy::Index(0));
        assert_eq!(fl_step(&cv(&[1, 1]), 3, &z).unwrap(), Strategy::Index(0));
        assert_eq!(fl_step(&cv(&[1, 2]), 4, &z).unwrap(), Strategy::Index(1));
        assert_eq!(fl_step(&cv(&[0, 0]), 1, &z).unwrap(), Strategy::Index(0));
        let l = LossSpec::<f64>::log(2).unwrap();
        assert_eq!(
            fl_step(&cv(&[3, 1]), 5, &l).unwrap(),
            Strategy::Distribution(vec![0.75, 0.25])
        );
        assert_eq!(
            fl_step(&cv(&[0, 0]), 1, &l).unwrap(),
            Strategy::Distribution(vec![0.5, 0.5])
        );
        assert!(fl_step(&cv(&[1, 1]), 2, &z).is_err());
    }

    #[test]
    fn clairvoyant_examples() {
        let z = LossSpec::<f64>::zero_one(2).unwrap();
        let sched = DitherSchedule::constant(0.5).unwrap();
        // N^cl = (1 + 0.5*0.3, 0.5*0.9) = (1.15, 0.45)
        let b = clairvoyant_step(&sched, &cv(&[1, 0]), 1, &z, &[0.3, 0.9]).unwrap();
        assert_eq!(b, Strategy::Index(0));
        // vanishing dither: hindsight leader
        let tiny = DitherSchedule::constant(1e-9).unwrap();
        let b = clairvoyant_step(&tiny, &cv(&[2, 3]), 5, &z, &[0.99, 0.01]).unwrap();
        assert_eq!(b, Strategy::Index(1));
        assert!(clairvoyant_step(&sched, &cv(&[1, 0]), 2, &z, &[0.3, 0.9]).is_err());
    }

    #[test]
    fn fpl_examples() {
        let z = LossSpec::<f64>::zero_one(2).unwrap();
        let mut s = RandomStream::new(3);
        for counts in [[2u64, 1], [1, 1], [0, 3], [5, 9]] {
            let c = cv(&counts);
            let t = c.total() as usize + 1;
            let fl = fl_step(&c, t, &z).unwrap().index().unwrap();
            assert_eq!(fpl_step(&c, t, &z, &mut s, 0.0).unwrap(), fl);
        }
        let mut picks = [0usize; 2];
        for _ in 0..20_000 {
            picks[fpl_step(&cv(&[0, 0]), 1, &z, &mut s, 1.0).unwrap()] += 1;
        }
        let frac = picks[0] as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 0.015, "{frac}");
        assert!(fpl_step(
            &cv(&[0, 0]),
            1,
            &LossSpec::<f64>::log(2).unwrap(),
            &mut s,
            1.0
        )
        .is_err());
    }

    #[test]
    fn fpl_pick_probability_matches_grid_quadrature() {
        // Oracle: midpoint quadrature over (u0, u1) of 1{L(0) - s u0 <= L(1) - s u1}
        // where the 0-1 cumulative losses are L(0) = N1 = 2 and L(1) = N0 = 1.
        let z = LossSpec::<f64>::zero_one(2).unwrap();
        let counts = cv(&[1, 2]);
        let scale = 1.5;
        let g = 800;
        let mut inside = 0usize;
        for i in 0..g {
            for j in 0..g {
                let u0 = (i as f64 + 0.5) / g as f64;
                let u1 = (j as f64 + 0.5) / g as f64;
                if 2.0 - scale * u0 <= 1.0 - scale * u1 {
                    inside += 1;
                }
            }
        }
        let oracle = inside as f64 / (g * g) as f64;
        let mut s = RandomStream::new(11);
        let trials = 200_000;
        let hits = (0..trials)
            .filter(|_| fpl_step(&counts, 4, &z, &mut s, scale).unwrap() == 0)
            .count();
        let mc = hits as f64 / trials as f64;
        let se = (oracle * (1.0 - oracle) / trials as f64).sqrt();
        assert!(
            (mc - oracle).abs() < 4.0 * se + 2e-3,
            "mc {mc} oracle {oracle}"
        );
    }

    #[test]
    fn shared_mode_reuses_first_dither() {
        let l = LossSpec::<f64>::log(2).unwrap();
        let sched = DitherSchedule::constant(1.0).unwrap();
        let cfg = PredictorConfig::Fpf {
            schedule: sched,
            dither: DitherMode::Shared,
        };
        let mut f = Forecaster::new(cfg, &l, 9).unwrap();
        let (_, d1) = f
            .fpf_step_with_distribution(&sched, DitherMode::Shared, &cv(&[0, 0]), 1, &l)
            .unwrap();
        let (_, d2) = f
            .fpf_step_with_distribution(&sched, DitherMode::Shared, &cv(&[1, 0]), 2, &l)
            .unwrap();
        // raw weights share the dither: d2 = d1 + (1, 0)
        assert_eq!(d2.raw_weights[1], d1.raw_weights[1]);
        assert_eq!(d2.raw_weights[0], d1.raw_weights[0] + 1.0);
    }

    #[test]
    fn smoothed_single_sample_equals_fpf() {
        let sq =
            LossSpec::squared_l2(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let sched = DitherSchedule::constant(1.0).unwrap();
        let cfg = PredictorConfig::SmoothedFpf {
            schedule: sched,
            inner_samples: 1,
        };
        let mut a = Forecaster::new(cfg.clone(), &sq, 17).unwrap();
        let mut b = Forecaster::new(cfg, &sq, 17).unwrap();
        let counts = cv(&[2, 1, 0]);
        let smooth = a.smoothed_fpf_step(&sched, 1, &counts, 4, &sq).unwrap();
        let plain = b
            .fpf_step(&sched, DitherMode::Iid, &counts, 4, &sq)
            .unwrap();
        assert_eq!(smooth, plain);
    }

    #[test]
    fn smoothed_first_step_is_the_midpoint() {
        let sq = LossSpec::<f64>::squared_l2(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let sched = DitherSchedule::constant(1.0).unwrap();
        let cfg = PredictorConfig::SmoothedFpf {
            schedule: sched,
            inner_samples: 100_000,
        };
        let mut f = Forecaster::new(cfg, &sq, 23).unwrap();
        let b = f.predict(&cv(&[0, 0]), 1, &sq).unwrap();
        let p = b.values().unwrap();
        assert!((p[0] - 0.5).abs() < 0.005, "{p:?}");
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn smoothed_concentrates_on_dominant_point() {
        // Oracle: with N = (k, 0) and tiny h, every inner FPF decision is within
        // h / k of point 0, so the average is too.
        let sq = LossSpec::<f64>::squared_l2(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let sched = DitherSchedule::constant(1e-3).unwrap();
        let cfg = PredictorConfig::SmoothedFpf {
            schedule: sched,
            inner_samples: 64,
        };
        let mut f = Forecaster::new(cfg, &sq, 1).unwrap();
        let b = f.predict(&cv(&[1000, 0]), 1001, &sq).unwrap();
        assert!(b.values().unwrap()[0] < 1e-3 / 1000.0 + 1e-15);
    }

    #[test]
    fn smoothed_rejects_nonconvex_losses() {
        let z = LossSpec::<f64>::zero_one(2).unwrap();
        let cfg = PredictorConfig::SmoothedFpf {
            schedule: DitherSchedule::constant(1.0).unwrap(),
            inner_samples: 4,
        };
        assert!(matches!(
            Forecaster::new(cfg, &z, 0),
            Err(Error::Unsupported(_))
        ));
        let sq = LossSpec::squared_l2(vec![vec![0.0], vec![1.0]]).unwrap();
        let mut f = Forecaster::new(
            PredictorConfig::fpf(DitherSchedule::constant(1.0).unwrap()),
            &sq,
            0,
        )
        .unwrap();
        assert!(f
            .smoothed_fpf_step(
                &DitherSchedule::constant(1.0).unwrap(),
                4,
                &cv(&[0, 0]),
                1,
                &z
            )
            .is_err());
    }

    #[test]
    fn predict_index_matches_predict() {
        let mtx = LossSpec::matrix(vec![
            vec![0.0, 2.0, 1.0],
            vec![1.0, 0.0, 3.0],
            vec![0.5, 0.5, 0.5],
        ])
        .unwrap();
        let sched = DitherSchedule::power_law(0.7, 0.5).unwrap();
        for cfg in [
            PredictorConfig::fpf(sched),
            PredictorConfig::Fpf {
                schedule: sched,
                dither: DitherMode::Shared,
            },
            PredictorConfig::Fpl { scale: sched },
            PredictorConfig::FollowLeader,
        ] {
            let mut a = Forecaster::new(cfg.clone(), &mtx, 77).unwrap();
            let mut b = Forecaster::new(cfg, &mtx, 77).unwrap();
            let mut counts = CountVector::zeros(crate::seq::Alphabet::new(3).unwrap());
            for t in 1..=50 {
                let i = a.predict_index(&counts, t, &mtx).unwrap();
                let s = b.predict(&counts, t, &mtx).unwrap();
                assert_eq!(Strategy::Index(i), s);
                counts.push((t * 7) % 3);
            }
        }
    }

    #[test]
    fn consistency_ranges() {
        let z = LossSpec::<f64>::zero_one(2).unwrap();
        let l = LossSpec::<f64>::log(2).unwrap();
        let constant = PredictorConfig::fpf(DitherSchedule::constant(0.5).unwrap());
        let growing = PredictorConfig::fpf(DitherSchedule::power_law(1.0, 0.5).unwrap());
        assert!(constant.hannan_consistent_for(&l));
        assert!(!constant.hannan_consistent_for(&z));
        assert!(growing.hannan_consistent_for(&z));
        assert!(!PredictorConfig::<f64>::FollowLeader.hannan_consistent_for(&z));
    }

    #[test]
    fn f32_forecaster_runs() {
        let z = LossSpec::<f32>::zero_one(2).unwrap();
        let mut f = Forecaster::new(
            PredictorConfig::fpf(DitherSchedule::<f32>::sqrt_optimal(2)),
            &z,
            1,
        )
        .unwrap();
        let b = f.predict(&cv(&[3, 0]), 4, &z).unwrap();
        assert_eq!(b, Strategy::Index(0));
    }

    proptest! {
        #[test]
        fn argmin_invariant_under_positive_scaling(
            rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 2..6),
            counts in prop::collection::vec(0u64..20, 3),
            h in 0.05f64..10.0,
            seed in any::<u64>(),
            c in 1e-3f64..1e3,
        ) {
            let l = LossSpec::matrix(rows).unwrap();
            let counts = CountVector::from_counts(counts).unwrap();
            let t = counts.total() as usize + 1;
            let u: Vec<f64> = RandomStream::new(seed).draw_dither(3);
            let d = perturbed_assignment(&counts, t, &DitherSchedule::constant(h).unwrap(), &u).unwrap();
            prop_assert_eq!(l.best_index(&d.raw_weights), l.best_index(&d.scaled_weights(c)));
            prop_assert_eq!(l.best_index(&d.raw_weights), l.best_index(&d.probs));
        }
    }
}
