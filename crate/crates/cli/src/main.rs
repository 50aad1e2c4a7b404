use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fpf::adversary::{anti_deterministic, iid_sequence, round_robin};
use fpf::harness::quadrature_expected_regret;
use fpf::{
    Alphabet, BoundQuery, DitherSchedule, LossSpec, PredictorConfig, StateSequence, Theorem,
};
use fpf_cli::output::{sig12, write_run_csv};
use fpf_cli::verify::{run_suite, Suite, VerifyOptions};
use fpf_cli::{run_experiment, summary_line, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "fpf",
    version,
    about = "Follow-the-Perturbed-Frequency forecasting experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo regret experiment and write per-trial CSV.
    Run(RunArgs),
    /// Evaluate a closed-form regret bound.
    Bound(BoundArgs),
    /// Run a verification suite (exit 2 if any check fails).
    Verify(VerifyArgs),
    /// Write an adversarial sequence file.
    GenAdversary(GenArgs),
    /// Expected regret of FPF on a short sequence by grid quadrature.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `output_path`. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct ScheduleArgs {
    /// Constant amplitude `h`.
    #[arg(long, conflicts_with = "h1")]
    h: Option<f64>,
    /// Power-law amplitude `h_t = h1 * t^alpha`.
    #[arg(long)]
    h1: Option<f64>,
    #[arg(long, requires = "h1", default_value_t = 0.5)]
    alpha: f64,
}

impl ScheduleArgs {
    fn schedule(&self) -> Result<Option<DitherSchedule<f64>>> {
        Ok(match (self.h, self.h1) {
            (Some(h), _) => Some(DitherSchedule::constant(h)?),
            (None, Some(h1)) => Some(DitherSchedule::power_law(h1, self.alpha)?),
            (None, None) => None,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    BoundedLoss,
    BoundedLossSqrt,
    LogLossRaw,
    LogLossConstH,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Loss bound `R` for the bounded-loss theorems.
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Print the column header first.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_parser = ["bounds", "oracle", "variance", "adversary", "all"], default_value = "all")]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Scale applied to every bound before comparison (test fixture).
    #[arg(long, hide = true)]
    bound_scale: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryKind {
    RoundRobin,
    Iid,
    AntiDeterministic,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    FollowLeader,
    Fixed,
}

#[derive(Args)]
struct GenArgs {
    /// Generate the adversary of an experiment config instead of using flags.
    #[arg(long, conflicts_with = "kind")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    kind: Option<AdversaryKind>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    /// State probabilities for `iid`, comma separated.
    #[arg(long, value_delimiter = ',')]
    probs: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deterministic forecaster the anti-deterministic sequence defeats.
    #[arg(long, value_enum, default_value = "follow-leader")]
    target: TargetArg,
    /// Row played by a `fixed` target.
    #[arg(long, default_value_t = 0)]
    strategy: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Comma-separated states.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "sequence",
        required_unless_present = "sequence"
    )]
    states: Vec<usize>,
    /// Newline-delimited sequence file.
    #[arg(long)]
    sequence: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// `{"rows": [[...]]}` loss matrix; 0-1 loss when absent.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long, default_value_t = 400)]
    grid: usize,
}

/// A scientific check failed, as opposed to a usage or I/O error.
struct VerificationFailed;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Bound(a) => cmd_bound(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a).map(|r| r.is_ok()),
        Command::GenAdversary(a) => cmd_gen(a).map(|_| true),
        Command::Oracle(a) => cmd_oracle(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let (mut cfg, base) = ExperimentConfig::load(&a.config)?;
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    let mut exp = cfg.resolve(&base)?;
    if a.out.is_some() {
        exp.output_path = a.out;
    }
    let report = run_experiment(&exp)?;
    let summary = summary_line(&exp, &report);
    match &exp.output_path {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_run_csv(&mut w, &report, exp.master_seed)?;
            w.flush()?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_run_csv(&mut w, &report, exp.master_seed)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_bound(a: BoundArgs) -> Result<()> {
    let theorem = match a.theorem {
        TheoremArg::BoundedLoss => Theorem::BoundedLoss,
        TheoremArg::BoundedLossSqrt => Theorem::BoundedLossSqrt,
        TheoremArg::LogLossRaw => Theorem::LogLossRaw,
        TheoremArg::LogLossConstH => Theorem::LogLossConstH,
    };
    let schedule = match (theorem, a.schedule.schedule()?) {
        (Theorem::BoundedLoss | Theorem::LogLossRaw, None) => {
            bail!(
                "--theorem {} needs a schedule (--h or --h1/--alpha)",
                theorem.name()
            )
        }
        (_, Some(s)) => s,
        (_, None) => DitherSchedule::Constant { h: 1.0 },
    };
    let query = BoundQuery {
        theorem,
        n: a.n,
        m: a.m,
        r: a.r,
        schedule,
    };
    let value = query.evaluate()?;
    let cap = query.cap().map(sig12).unwrap_or_default();
    if a.header {
        println!("theorem,n,m,value,cap");
    }
    println!("{},{},{},{},{cap}", theorem.name(), a.n, a.m, sig12(value));
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<std::result::Result<(), VerificationFailed>> {
    let suite = Suite::parse(&a.suite).ok_or_else(|| anyhow!("unknown suite {}", a.suite))?;
    let mut opts = VerifyOptions::default();
    if let Some(s) = a.seed {
        opts.master_seed = s;
    }
    if let Some(t) = a.threads {
        if t == 0 {
            bail!("--threads must be >= 1");
        }
        opts.threads = Some(t);
    }
    if let Some(scale) = a.bound_scale {
        opts.bound_scale = scale;
    }
    let checks = run_suite(suite, &opts);
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{c}");
    }
    println!("{}/{} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 {
        Ok(())
    } else {
        Err(VerificationFailed)
    })
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let seq = match (&a.config, a.kind) {
        (Some(path), _) => {
            let (cfg, base) = ExperimentConfig::load(path)?;
            let exp = cfg.resolve(&base)?;
            exp.adversary.generate(&exp.loss)?
        }
        (None, Some(kind)) => {
            let n = a.n.expect("clap enforces --n");
            match kind {
                AdversaryKind::RoundRobin => round_robin(a.m, n)?,
                AdversaryKind::Iid => {
                    if a.probs.len() != a.m {
                        bail!("--probs needs {} values, got {}", a.m, a.probs.len());
                    }
                    iid_sequence(&a.probs, n, a.seed)?
                }
                AdversaryKind::AntiDeterministic => {
                    let target = match a.target {
                        TargetArg::FollowLeader => PredictorConfig::FollowLeader,
                        TargetArg::Fixed => PredictorConfig::Fixed {
                            strategy: a.strategy,
                        },
                    };
                    anti_deterministic(&target, &LossSpec::<f64>::zero_one(a.m)?, n)?
                }
            }
        }
        (None, None) => bail!("give --config or --kind"),
    };
    match &a.out {
        Some(path) => std::fs::write(path, seq.to_text())
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{}", seq.to_text()),
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let alphabet = Alphabet::new(a.m)?;
    let seq = match &a.sequence {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            StateSequence::from_text(&text, alphabet)?
        }
        None => StateSequence::new(a.states.clone(), alphabet)?,
    };
    let loss = match &a.matrix {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            LossSpec::matrix_from_json(&text)?
        }
        None => LossSpec::zero_one(a.m)?,
    };
    let schedule = a
        .schedule
        .schedule()?
        .ok_or_else(|| anyhow!("the oracle needs a schedule (--h or --h1/--alpha)"))?;
    let value = quadrature_expected_regret(&PredictorConfig::fpf(schedule), &seq, &loss, a.grid)?;
    println!("{}", sig12(value));
    Ok(())
}
