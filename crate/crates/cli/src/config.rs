//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "alphabet_size": 2,
//!   "horizon": 1000,
//!   "loss": { "kind": "zero_one" },
//!   "schedule": { "kind": "sqrt_optimal" },
//!   "predictor": { "kind": "fpf" },
//!   "adversary": { "kind": "round_robin" },
//!   "trials": 100,
//!   "master_seed": 7,
//!   "output_path": "run.csv"
//! }
//! ```
//!
//! Relative paths inside the file resolve against the file's directory.
//! Every rejection names the offending field, e.g. `loss.rows[1]`.

use std::fmt;
use std::path::{Path, PathBuf};

use fpf::{
    AdversarySpec, Alphabet, DitherMode, DitherSchedule, LossSpec, PredictorConfig, StateSequence,
};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "invalid config: {}", self.message)
        } else {
            write!(f, "invalid config at `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alphabet_size: usize,
    pub horizon: usize,
    pub loss: LossConfig,
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
    pub predictor: PredictorKind,
    pub adversary: AdversaryConfig,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossConfig {
    ZeroOne,
    Log,
    Matrix {
        #[serde(default)]
        rows: Option<Vec<Vec<f64>>>,
        /// A `{"rows": [...]}` file, used when `rows` is absent.
        #[serde(default)]
        path: Option<PathBuf>,
    },
    SquaredL2 {
        points: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    PowerLaw {
        h1: f64,
        alpha: f64,
    },
    Constant {
        h: f64,
    },
    /// `h_t = sqrt(2t / m)`.
    SqrtOptimal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredictorKind {
    Fpf {
        #[serde(default)]
        dither: DitherMode,
    },
    FollowLeader,
    Fpl,
    Clairvoyant,
    SmoothedFpf {
        #[serde(default)]
        inner_samples: Option<usize>,
    },
    Fixed {
        strategy: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversaryConfig {
    /// Inline `states` or a newline-delimited sequence file at `path`.
    Fixed {
        #[serde(default)]
        states: Option<Vec<usize>>,
        #[serde(default)]
        path: Option<PathBuf>,
    },
    Iid {
        probs: Vec<f64>,
        #[serde(default)]
        seed: u64,
    },
    RoundRobin,
    AntiDeterministic {
        target: PredictorKind,
    },
}

/// A validated, fully resolved experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub loss: LossSpec<f64>,
    pub predictor: PredictorConfig<f64>,
    pub adversary: AdversarySpec<f64>,
    pub horizon: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub threads: Option<usize>,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { String::new() } else { path };
            ConfigError::new(path, e.into_inner())
        })
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_json(&text)?, base))
    }

    /// Checks every field and builds the runnable experiment.
    pub fn resolve(&self, base_dir: &Path) -> Result<Experiment, ConfigError> {
        let m = self.alphabet_size;
        let alphabet = Alphabet::new(m).map_err(|e| ConfigError::new("alphabet_size", e))?;
        if self.horizon == 0 {
            return Err(ConfigError::new("horizon", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(ConfigError::new("trials", "must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::new("threads", "must be >= 1"));
        }

        let loss = self.build_loss(base_dir)?;
        if loss.alphabet_size() != m {
            return Err(ConfigError::new(
                "loss",
                format!(
                    "covers {} states but alphabet_size is {m}",
                    loss.alphabet_size()
                ),
            ));
        }
        let schedule = self.build_schedule()?;
        let predictor = build_predictor(&self.predictor, schedule, "predictor", "schedule")?;
        predictor
            .validate(&loss)
            .map_err(|e| ConfigError::new("predictor", e))?;
        let adversary = self.build_adversary(alphabet, &loss, schedule, base_dir)?;

        Ok(Experiment {
            loss,
            predictor,
            adversary,
            horizon: self.horizon,
            trials: self.trials,
            master_seed: self.master_seed,
            threads: self.threads,
            output_path: self.output_path.as_ref().map(|p| base_dir.join(p)),
        })
    }

    fn build_loss(&self, base_dir: &Path) -> Result<LossSpec<f64>, ConfigError> {
        let m = self.alphabet_size;
        match &self.loss {
            LossConfig::ZeroOne => LossSpec::zero_one(m).map_err(|e| ConfigError::new("loss", e)),
            LossConfig::Log => LossSpec::log(m).map_err(|e| ConfigError::new("loss", e)),
            LossConfig::Matrix {
                rows: Some(rows),
                path: None,
            } => {
                for (b, row) in rows.iter().enumerate() {
                    if row.len() != m {
                        return Err(ConfigError::new(
                            format!("loss.rows[{b}]"),
                            format!("expected {m} entries, got {}", row.len()),
                        ));
                    }
                }
                LossSpec::matrix(rows.clone()).map_err(|e| ConfigError::new("loss.rows", e))
            }
            LossConfig::Matrix {
                rows: None,
                path: Some(p),
            } => {
                let full = base_dir.join(p);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    ConfigError::new("loss.path", format!("cannot read {}: {e}", full.display()))
                })?;
                LossSpec::matrix_from_json(&text).map_err(|e| ConfigError::new("loss.path", e))
            }
            LossConfig::Matrix { .. } => Err(ConfigError::new(
                "loss",
                "give exactly one of `rows` or `path`",
            )),
            LossConfig::SquaredL2 { points } => {
                LossSpec::squared_l2(points.clone()).map_err(|e| ConfigError::new("loss.points", e))
            }
        }
    }

    fn build_schedule(&self) -> Result<Option<DitherSchedule<f64>>, ConfigError> {
        let Some(cfg) = self.schedule else {
            return Ok(None);
        };
        let s = match cfg {
            ScheduleConfig::PowerLaw { h1, alpha } => DitherSchedule::power_law(h1, alpha),
            ScheduleConfig::Constant { h } => DitherSchedule::constant(h),
            ScheduleConfig::SqrtOptimal => Ok(DitherSchedule::sqrt_optimal(self.alphabet_size)),
        };
        s.map(Some).map_err(|e| ConfigError::new("schedule", e))
    }

    fn build_adversary(
        &self,
        alphabet: Alphabet,
        loss: &LossSpec<f64>,
        schedule: Option<DitherSchedule<f64>>,
        base_dir: &Path,
    ) -> Result<AdversarySpec<f64>, ConfigError> {
        let m = alphabet.size();
        let n = self.horizon;
        Ok(match &self.adversary {
            AdversaryConfig::Fixed { states, path } => {
                let seq = match (states, path) {
                    (Some(s), None) => {
                        if let Some(i) = s.iter().position(|&x| x >= m) {
                            return Err(ConfigError::new(
                                format!("adversary.states[{i}]"),
                                format!("state {} outside 0..{m}", s[i]),
                            ));
                        }
                        StateSequence::new(s.clone(), alphabet)
                            .map_err(|e| ConfigError::new("adversary.states", e))?
                    }
                    (None, Some(p)) => {
                        let full = base_dir.join(p);
                        let text = std::fs::read_to_string(&full).map_err(|e| {
                            ConfigError::new(
                                "adversary.path",
                                format!("cannot read {}: {e}", full.display()),
                            )
                        })?;
                        StateSequence::from_text(&text, alphabet)
                            .map_err(|e| ConfigError::new("adversary.path", e))?
                    }
                    _ => {
                        return Err(ConfigError::new(
                            "adversary",
                            "give exactly one of `states` or `path`",
                        ))
                    }
                };
                if seq.len() != n {
                    return Err(ConfigError::new(
                        "adversary",
                        format!("sequence has {} states but horizon is {n}", seq.len()),
                    ));
                }
                AdversarySpec::Fixed(seq)
            }
            AdversaryConfig::Iid { probs, seed } => {
                if probs.len() != m {
                    return Err(ConfigError::new(
                        "adversary.probs",
                        format!("expected {m} probabilities, got {}", probs.len()),
                    ));
                }
                fpf::adversary::iid_sequence(probs, 1, *seed)
                    .map_err(|e| ConfigError::new("adversary.probs", e))?;
                AdversarySpec::Iid {
                    probs: probs.clone(),
                    n,
                    seed: *seed,
                }
            }
            AdversaryConfig::RoundRobin => AdversarySpec::RoundRobin { m, n },
            AdversaryConfig::AntiDeterministic { target } => {
                if !matches!(loss, LossSpec::ZeroOne { m: 2 }) {
                    return Err(ConfigError::new(
                        "adversary",
                        format!(
                            "unsupported combination: anti_deterministic needs a binary zero_one loss, got {} over {m} states",
                            loss.name()
                        ),
                    ));
                }
                let target = build_predictor(target, schedule, "adversary.target", "schedule")?;
                if !matches!(
                    target,
                    PredictorConfig::FollowLeader | PredictorConfig::Fixed { .. }
                ) {
                    return Err(ConfigError::new(
                        "adversary.target",
                        format!(
                            "unsupported combination: target must be follow_leader or fixed, got {}",
                            target.name()
                        ),
                    ));
                }
                target
                    .validate(loss)
                    .map_err(|e| ConfigError::new("adversary.target", e))?;
                AdversarySpec::AntiDeterministic { target, n }
            }
        })
    }
}

fn build_predictor(
    kind: &PredictorKind,
    schedule: Option<DitherSchedule<f64>>,
    at: &str,
    schedule_at: &str,
) -> Result<PredictorConfig<f64>, ConfigError> {
    let need = |name: &str| {
        schedule.ok_or_else(|| {
            ConfigError::new(
                schedule_at,
                format!("required by the {name} predictor at `{at}`"),
            )
        })
    };
    Ok(match kind {
        PredictorKind::Fpf { dither } => PredictorConfig::Fpf {
            schedule: need("fpf")?,
            dither: *dither,
        },
        PredictorKind::FollowLeader => PredictorConfig::FollowLeader,
        PredictorKind::Fpl => PredictorConfig::Fpl {
            scale: need("fpl")?,
        },
        PredictorKind::Clairvoyant => PredictorConfig::Clairvoyant {
            schedule: need("clairvoyant")?,
        },
        PredictorKind::SmoothedFpf { inner_samples } => {
            let inner = inner_samples.unwrap_or(fpf::predict::DEFAULT_INNER_SAMPLES);
            if inner == 0 {
                return Err(ConfigError::new(
                    format!("{at}.inner_samples"),
                    "must be >= 1",
                ));
            }
            PredictorConfig::SmoothedFpf {
                schedule: need("smoothed_fpf")?,
                inner_samples: inner,
            }
        }
        PredictorKind::Fixed { strategy } => PredictorConfig::Fixed {
            strategy: *strategy,
        },
    })
}
