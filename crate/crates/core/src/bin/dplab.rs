//! `dplab` — run the lab's experiments from the command line.
//!
//! Each subcommand wraps one experiment from `dplab::harness`; the binary
//! only parses flags, caps the worker pool from `DPLAB_THREADS`, prints or
//! writes the report, and maps outcomes to exit codes:
//!
//! * `0` — experiment completed (and `--check`, if given, passed),
//! * `2` — usage or parameter error (including bad `DPLAB_THREADS`),
//! * `3` — `--check` was given and an acceptance threshold failed.

use clap::{Args, Parser, Subcommand};
use dplab::harness::{run_experiment, thread_cap, ExperimentConfig, ExperimentKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dplab",
    version,
    about = "Differential privacy under continual observation: mechanisms, attacks, audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every experiment.
#[derive(Args)]
struct Common {
    /// RNG seed; a fixed seed reproduces the run bit for bit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Enforce the experiment's acceptance thresholds (exit 3 on failure).
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Interval-halving attack against a threshold monitor at k, T = 2^(k+1)-2.
    AttackMonitor {
        /// Monitor family: svt | sampling | tree | exact | zero.
        #[arg(long)]
        mech: String,
        /// Threshold parameter k; the horizon is derived from it.
        #[arg(long)]
        k: u64,
        /// Privacy parameter for svt and tree.
        #[arg(long)]
        eps: Option<f64>,
        /// Privacy parameter for sampling.
        #[arg(long)]
        delta: Option<f64>,
        /// Monte-Carlo trials per halting-probability estimate.
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Max-error benchmark of the tree counter on a seeded coin-flip stream.
    CounterBench {
        /// Counter: tree (default) | zero.
        #[arg(long)]
        mech: Option<String>,
        /// Horizon.
        #[arg(long = "T")]
        t: usize,
        /// Privacy parameter.
        #[arg(long)]
        eps: f64,
        /// Independent noise runs.
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify the halting-probability ladder for one rung budget.
    Ladder {
        /// Per-rung eps'.
        #[arg(long)]
        eps: f64,
        /// Per-rung delta'.
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact joint-DP audit of the mirror over all streams at horizon T.
    MirrorAudit {
        /// Target eps.
        #[arg(long)]
        eps: f64,
        /// Target delta.
        #[arg(long)]
        delta: f64,
        /// Mirror delay K.
        #[arg(long)]
        k: u64,
        /// Audit horizon (exhaustive over all 2^T streams).
        #[arg(long = "T")]
        t: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Mistake-bound benchmark of the private point-function predictor.
    PredictorBench {
        /// Privacy parameter eps.
        #[arg(long)]
        eps: f64,
        /// Privacy parameter delta.
        #[arg(long)]
        delta: f64,
        /// Rounds per run.
        #[arg(long = "T")]
        t: usize,
        /// Independent runs.
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Mistake lower-bound attack against an online learner.
    LearnerAttack {
        /// Learner: all-zero | consistent | random.
        #[arg(long)]
        mech: String,
        /// Rounds; must be a perfect square.
        #[arg(long = "T")]
        t: usize,
        /// Trials per probability estimate.
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Map a seeded update stream to a threshold-query dataset.
    AdaptQueries {
        /// Stream length.
        #[arg(long = "T")]
        t: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn into_config(self) -> ExperimentConfig {
        // Start from the kind, then move each subcommand's flags into the
        // shared config shape the dispatcher consumes.
        let (kind, common) = match &self {
            Command::AttackMonitor { common, .. } => (ExperimentKind::AttackMonitor, common),
            Command::CounterBench { common, .. } => (ExperimentKind::CounterBench, common),
            Command::Ladder { common, .. } => (ExperimentKind::Ladder, common),
            Command::MirrorAudit { common, .. } => (ExperimentKind::MirrorAudit, common),
            Command::PredictorBench { common, .. } => (ExperimentKind::PredictorBench, common),
            Command::LearnerAttack { common, .. } => (ExperimentKind::LearnerAttack, common),
            Command::AdaptQueries { common, .. } => (ExperimentKind::AdaptQueries, common),
        };
        let mut config = ExperimentConfig::new(kind);
        config.seed = common.seed;
        config.out = common.out.clone();
        config.check = common.check;
        match self {
            Command::AttackMonitor { mech, k, eps, delta, n, .. } => {
                config.mechanism = Some(mech);
                config.k = Some(k);
                config.eps = eps;
                config.delta = delta;
                config.n = Some(n);
            }
            Command::CounterBench { mech, t, eps, n, .. } => {
                config.mechanism = mech;
                config.t = Some(t);
                config.eps = Some(eps);
                config.n = Some(n);
            }
            Command::Ladder { eps, delta, .. } => {
                config.eps = Some(eps);
                config.delta = Some(delta);
            }
            Command::MirrorAudit { eps, delta, k, t, .. } => {
                config.eps = Some(eps);
                config.delta = Some(delta);
                config.k = Some(k);
                config.t = Some(t);
            }
            Command::PredictorBench { eps, delta, t, n, .. } => {
                config.eps = Some(eps);
                config.delta = Some(delta);
                config.t = Some(t);
                config.n = Some(n);
            }
            Command::LearnerAttack { mech, t, n, .. } => {
                config.mechanism = Some(mech);
                config.t = Some(t);
                config.n = Some(n);
            }
            Command::AdaptQueries { t, .. } => {
                config.t = Some(t);
            }
        }
        config
    }
}

fn main() -> ExitCode {
    // Pool size must be fixed before the first rayon call.
    match thread_cap(std::env::var("DPLAB_THREADS").ok().as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: could not configure {n} worker threads: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    let cli = Cli::parse();
    let config = cli.command.into_config();
    match run_experiment(&config) {
        Ok(outcome) => {
            if config.out.is_none() {
                print!("{}", outcome.report.render());
            }
            match outcome.check_passed {
                Some(false) => ExitCode::from(3),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
