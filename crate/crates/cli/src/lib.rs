//! Experiment runner for the `fpf` crate: JSON configs, CSV results and
//! the verification suites behind the `fpf` binary.

pub mod config;
pub mod output;
pub mod verify;

use fpf::harness::monte_carlo_regret;
use fpf::{MonteCarloOptions, RegretReport};

pub use config::{ConfigError, Experiment, ExperimentConfig};

/// Runs every trial of a resolved experiment.
pub fn run_experiment(exp: &Experiment) -> fpf::Result<RegretReport<f64>> {
    let opts = MonteCarloOptions {
        trials: exp.trials,
        master_seed: exp.master_seed,
        threads: exp.threads,
        regret_curve: false,
    };
    monte_carlo_regret(&exp.predictor, &exp.adversary, &exp.loss, opts)
}

/// One-line human-readable summary of a report.
pub fn summary_line(exp: &Experiment, report: &RegretReport<f64>) -> String {
    let bound = report
        .bound_value
        .map(|b| format!(", bound {}", output::sig12(b)))
        .unwrap_or_default();
    format!(
        "{} vs {} ({} loss, n = {}): mean regret {} +/- {} over {} trials, max {}{bound}",
        exp.predictor.name(),
        exp.adversary.name(),
        exp.loss.name(),
        report.horizon,
        output::sig12(report.mean_regret),
        output::sig12(report.ci95_halfwidth),
        report.trials,
        output::sig12(report.max_regret),
    )
}
