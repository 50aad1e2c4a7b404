//! Self-checks run by `fpf verify`.
//!
//! Each suite recomputes a family of invariants and reports every check;
//! a suite passes only if all of its checks do.

use std::fmt;

use fpf::adversary::{anti_deterministic, round_robin, second_sum_value};
use fpf::bounds::{
    bounded_loss_bound, empirical_step_variance, kolmogorov_partial_sum, log_loss_bound,
    log_loss_const_cap, power_law_relaxed_bound, sqrt_schedule_normalized_bound, type_class_check,
    variance_bound,
};
use fpf::harness::{monte_carlo_regret, quadrature_expected_regret, run_episode};
use fpf::{
    AdversarySpec, Alphabet, CountVector, DitherSchedule, LossSpec, MonteCarloOptions,
    PredictorConfig, StateSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bounds,
    Oracle,
    Variance,
    Adversary,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "bounds" => Suite::Bounds,
            "oracle" => Suite::Oracle,
            "variance" => Suite::Variance,
            "adversary" => Suite::Adversary,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Multiplies every regret bound before it is compared. Values below one
    /// corrupt the bounds on purpose so the failure path can be exercised.
    pub bound_scale: f64,
    pub master_seed: u64,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            bound_scale: 1.0,
            master_seed: 20_240_601,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// Observed value against the expected relation.
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(
            f,
            "{status} [{}] {}: {}",
            self.suite, self.name, self.detail
        )
    }
}

fn check(suite: &'static str, name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name: name.into(),
        passed,
        detail,
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    match suite {
        Suite::Bounds => bounds_suite(opts),
        Suite::Oracle => oracle_suite(opts),
        Suite::Variance => variance_suite(opts),
        Suite::Adversary => adversary_suite(opts),
        Suite::All => [
            Suite::Bounds,
            Suite::Oracle,
            Suite::Variance,
            Suite::Adversary,
        ]
        .into_iter()
        .flat_map(|s| run_suite(s, opts))
        .collect(),
    }
}

fn mc(trials: usize, opts: &VerifyOptions) -> MonteCarloOptions {
    MonteCarloOptions {
        trials,
        master_seed: opts.master_seed,
        threads: opts.threads,
        regret_curve: false,
    }
}

fn bounds_suite(opts: &VerifyOptions) -> Vec<Check> {
    const S: &str = "bounds";
    let scale = opts.bound_scale;
    let mut out = Vec::new();

    let v: f64 = bounded_loss_bound(100, 2, 1.0, &DitherSchedule::constant(10.0).unwrap());
    out.push(check(
        S,
        "bounded-loss sum, R=1 n=100 m=2 h=10",
        (v - 60.0).abs() < 1e-9,
        format!("{v} vs 60"),
    ));
    let v: f64 = log_loss_bound(1, 2, &DitherSchedule::constant(1.0).unwrap());
    out.push(check(
        S,
        "log-loss sum, n=1 m=2 h=1",
        (v - 2.0).abs() < 1e-12,
        format!("{v} vs 2"),
    ));

    let sqrt2 = DitherSchedule::sqrt_optimal(2);
    for k in [7u32, 10, 14] {
        let n = 1usize << k;
        let exact = bounded_loss_bound(n, 2, 1.0, &sqrt2);
        let closed = scale * n as f64 * sqrt_schedule_normalized_bound(1.0, 2, n);
        out.push(check(
            S,
            format!("sqrt schedule: exact sum <= closed form, n=2^{k}"),
            exact <= closed,
            format!("{exact:.6} <= {closed:.6}"),
        ));
    }
    for (h1, alpha) in [(1.0, 0.5), (0.5, 0.25), (2.0, 0.75)] {
        let s = DitherSchedule::power_law(h1, alpha).unwrap();
        let n = 5000;
        let exact = bounded_loss_bound(n, 3, 1.0, &s);
        let relaxed = scale * power_law_relaxed_bound(n, 3, 1.0, h1, alpha);
        out.push(check(
            S,
            format!("integral relaxation dominates, h1={h1} alpha={alpha}"),
            exact <= relaxed,
            format!("{exact:.6} <= {relaxed:.6}"),
        ));
    }

    let zo = LossSpec::<f64>::zero_one(2).unwrap();
    let pred = PredictorConfig::fpf(sqrt2);
    let n = 1024;
    match monte_carlo_regret(
        &pred,
        &AdversarySpec::RoundRobin { m: 2, n },
        &zo,
        mc(200, opts),
    ) {
        Ok(r) => {
            let bound = scale * r.bound_value.unwrap_or(f64::NAN);
            out.push(check(
                S,
                "FPF mean regret within bound, 0-1 loss round-robin n=1024",
                r.mean_regret <= bound + 3.0 * r.ci95_halfwidth,
                format!(
                    "{:.4} +/- {:.4} <= {bound:.4}",
                    r.mean_regret, r.ci95_halfwidth
                ),
            ))
        }
        Err(e) => out.push(check(
            S,
            "FPF mean regret within bound",
            false,
            e.to_string(),
        )),
    }

    for m in [2usize, 4] {
        let h = DitherSchedule::constant(1.0 / m as f64).unwrap();
        let gap = |n: usize| log_loss_bound(n, m, &h) - log_loss_const_cap::<f64>(m, n);
        let (g5, g6) = (gap(100_000), gap(1_000_000));
        let limit = (m * (m + 1)) as f64 - m as f64 * (m as f64).ln();
        out.push(check(
            S,
            format!("h=1/m log-loss sum minus m ln n settles, m={m}"),
            (g6 - g5).abs() < 1e-2 && g6 <= limit,
            format!("gap {g5:.6} -> {g6:.6}, limit {limit:.6}"),
        ));
    }

    let mut worst = f64::NEG_INFINITY;
    for a in 0..=12u64 {
        for b in 0..=12 - a {
            for c in 0..=12 - a - b {
                for counts in [vec![a, b], vec![a, b, c]] {
                    let (lhs, rhs): (f64, f64) =
                        type_class_check(&CountVector::from_counts(counts).unwrap()).unwrap();
                    worst = worst.max(lhs - rhs);
                }
            }
        }
    }
    out.push(check(
        S,
        "type-class inequality, n <= 12, m <= 3",
        worst <= 1e-9,
        format!("max lhs - rhs = {worst:.3e}"),
    ));
    out
}

fn oracle_suite(opts: &VerifyOptions) -> Vec<Check> {
    const S: &str = "oracle";
    let losses = [
        ("0-1", LossSpec::zero_one(2).unwrap()),
        (
            "asym",
            LossSpec::matrix(vec![vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap(),
        ),
    ];
    let seqs: [&[usize]; 3] = [&[0], &[0, 1], &[0, 0, 1, 0]];
    let mut out = Vec::new();
    for (lname, loss) in &losses {
        for states in seqs {
            let seq = StateSequence::new(states.to_vec(), Alphabet::binary()).unwrap();
            for h in [0.5, 1.0, 2.0] {
                let pred = PredictorConfig::fpf(DitherSchedule::constant(h).unwrap());
                let name = format!("{lname} loss, seq {states:?}, h={h}");
                let exact = match quadrature_expected_regret(&pred, &seq, loss, 400) {
                    Ok(v) => v,
                    Err(e) => {
                        out.push(check(S, name, false, e.to_string()));
                        continue;
                    }
                };
                match monte_carlo_regret(
                    &pred,
                    &AdversarySpec::Fixed(seq.clone()),
                    loss,
                    mc(20_000, opts),
                ) {
                    Ok(r) => {
                        let tol = 3.0 * r.ci95_halfwidth;
                        out.push(check(
                            S,
                            name,
                            (r.mean_regret - exact).abs() <= tol,
                            format!(
                                "MC {:.5} vs quadrature {exact:.5} (tol {tol:.5})",
                                r.mean_regret
                            ),
                        ));
                    }
                    Err(e) => out.push(check(S, name, false, e.to_string())),
                }
            }
        }
    }
    out
}

fn variance_suite(opts: &VerifyOptions) -> Vec<Check> {
    const S: &str = "variance";
    let sched = DitherSchedule::power_law(1.0, 0.5).unwrap();
    let pred = PredictorConfig::fpf(sched);
    let seq = round_robin(2, 1000).unwrap();
    let mut out = Vec::new();
    for t in [1usize, 10, 100, 1000] {
        let bound = variance_bound(t, &sched, 2);
        match empirical_step_variance(&pred, &seq, t, 2000, opts.master_seed) {
            Ok(v) => out.push(check(
                S,
                format!("step log-loss variance within bound, t={t}"),
                v.variance <= bound,
                format!("{:.5} <= {bound:.5}", v.variance),
            )),
            Err(e) => out.push(check(
                S,
                format!("step variance t={t}"),
                false,
                e.to_string(),
            )),
        }
    }
    let a: f64 = kolmogorov_partial_sum(&sched, 2, 1 << 20);
    let b: f64 = kolmogorov_partial_sum(&sched, 2, 1 << 21);
    out.push(check(
        S,
        "Kolmogorov partial sums converge, n=2^20 vs 2^21",
        (b - a).abs() < 1e-4,
        format!("{a:.8} vs {b:.8}"),
    ));
    out
}

fn adversary_suite(opts: &VerifyOptions) -> Vec<Check> {
    const S: &str = "adversary";
    let zo = LossSpec::<f64>::zero_one(2).unwrap();
    let mut out = Vec::new();
    let n = 1000;
    match anti_deterministic(&PredictorConfig::FollowLeader, &zo, n)
        .and_then(|seq| run_episode(&PredictorConfig::FollowLeader, &seq, &zo, opts.master_seed))
    {
        Ok(ep) => out.push(check(
            S,
            "follow-the-leader loses every round against its adversary",
            ep.cum_loss == n as f64 && ep.regret >= (n / 2) as f64,
            format!("cum_loss {} regret {}", ep.cum_loss, ep.regret),
        )),
        Err(e) => out.push(check(
            S,
            "follow-the-leader adversary",
            false,
            e.to_string(),
        )),
    }

    let schedules = [
        DitherSchedule::constant(1.0).unwrap(),
        DitherSchedule::power_law(1.0, 0.5).unwrap(),
    ];
    for (m, len) in [(2usize, 8usize), (3, 6)] {
        let alphabet = Alphabet::new(m).unwrap();
        let rr = round_robin(m, len).unwrap();
        let mut violations = 0;
        for s in &schedules {
            let top: f64 = second_sum_value(&rr, s);
            for code in 0..m.pow(len as u32) {
                let mut c = code;
                let states: Vec<usize> = (0..len)
                    .map(|_| {
                        let x = c % m;
                        c /= m;
                        x
                    })
                    .collect();
                let seq = StateSequence::new(states, alphabet).unwrap();
                if second_sum_value(&seq, s) > top + 1e-12 {
                    violations += 1;
                }
            }
        }
        out.push(check(
            S,
            format!("round-robin maximizes the log-loss second sum, m={m} n={len}"),
            violations == 0,
            format!(
                "{violations} violations over {} sequences",
                2 * m.pow(len as u32)
            ),
        ));
    }
    out
}
