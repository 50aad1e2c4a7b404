//! Follow-the-Perturbed-Frequency (FPF) universal forecasting.
//!
//! FPF adds a uniform dither of amplitude `h_t` to the past state counts,
//! normalizes them into a probability assignment, and plays the strategy
//! minimizing expected loss under it. The crate provides the forecaster and
//! its baselines, adversarial sequence generators, a seeded Monte Carlo
//! regret harness with a quadrature oracle, and closed-form regret bounds.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the concrete instantiations.

pub mod adversary;
pub mod assignment;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod loss;
pub mod predict;
pub mod scalar;
pub mod schedule;
pub mod seq;
pub mod stream;

pub use adversary::AdversarySpec;
pub use assignment::PerturbedDistribution;
pub use bounds::{BoundQuery, Theorem};
pub use error::{Error, Result};
pub use harness::{EpisodeResult, MonteCarloOptions, RegretReport, TrialRecord};
pub use loss::{LossBound, LossSpec, Strategy};
pub use predict::{DitherMode, Forecaster, PredictorConfig};
pub use scalar::Scalar;
pub use schedule::DitherSchedule;
pub use seq::{Alphabet, CountVector, StateSequence};
pub use stream::RandomStream;

pub type DitherScheduleF64 = DitherSchedule<f64>;
pub type PerturbedDistributionF64 = PerturbedDistribution<f64>;
pub type LossSpecF64 = LossSpec<f64>;
pub type StrategyF64 = Strategy<f64>;
pub type PredictorConfigF64 = PredictorConfig<f64>;
pub type ForecasterF64 = Forecaster<f64>;
pub type AdversarySpecF64 = AdversarySpec<f64>;
pub type EpisodeResultF64 = EpisodeResult<f64>;
pub type RegretReportF64 = RegretReport<f64>;
pub type BoundQueryF64 = BoundQuery<f64>;

pub type DitherScheduleF32 = DitherSchedule<f32>;
pub type PerturbedDistributionF32 = PerturbedDistribution<f32>;
pub type LossSpecF32 = LossSpec<f32>;
pub type StrategyF32 = Strategy<f32>;
pub type PredictorConfigF32 = PredictorConfig<f32>;
pub type ForecasterF32 = Forecaster<f32>;
pub type AdversarySpecF32 = AdversarySpec<f32>;
pub type EpisodeResultF32 = EpisodeResult<f32>;
pub type RegretReportF32 = RegretReport<f32>;
pub type BoundQueryF32 = BoundQuery<f32>;
