//! Experiment configuration shared by the CLI and the dispatcher.

use crate::error::{param_err, Result};
use std::fmt;
use std::path::PathBuf;

/// The seven experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    AttackMonitor,
    CounterBench,
    Ladder,
    MirrorAudit,
    PredictorBench,
    LearnerAttack,
    AdaptQueries,
}

impl ExperimentKind {
    /// The subcommand spelling.
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::AttackMonitor => "attack-monitor",
            ExperimentKind::CounterBench => "counter-bench",
            ExperimentKind::Ladder => "ladder",
            ExperimentKind::MirrorAudit => "mirror-audit",
            ExperimentKind::PredictorBench => "predictor-bench",
            ExperimentKind::LearnerAttack => "learner-attack",
            ExperimentKind::AdaptQueries => "adapt-queries",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "attack-monitor" => ExperimentKind::AttackMonitor,
            "counter-bench" => ExperimentKind::CounterBench,
            "ladder" => ExperimentKind::Ladder,
            "mirror-audit" => ExperimentKind::MirrorAudit,
            "predictor-bench" => ExperimentKind::PredictorBench,
            "learner-attack" => ExperimentKind::LearnerAttack,
            "adapt-queries" => ExperimentKind::AdaptQueries,
            other => param_err!("unknown experiment {other:?}"),
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything an experiment run needs. Fields an experiment does not use
/// stay `None`; each runner pulls what it requires through the `need_*`
/// accessors, which turn a missing value into a parameter error naming the
/// flag, so the CLI reports it as a usage problem (exit 2).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Mechanism (attack-monitor, counter-bench) or learner (learner-attack).
    pub mechanism: Option<String>,
    pub k: Option<u64>,
    pub t: Option<usize>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    /// Trial / run count.
    pub n: Option<u64>,
    pub seed: u64,
    /// Report destination; `None` prints to stdout.
    pub out: Option<PathBuf>,
    /// Enforce the experiment's acceptance thresholds (exit 3 on failure).
    pub check: bool,
}

impl ExperimentConfig {
    /// A bare config for `kind` with nothing else set.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            mechanism: None,
            k: None,
            t: None,
            eps: None,
            delta: None,
            n: None,
            seed: 0,
            out: None,
            check: false,
        }
    }

    pub fn need_mechanism(&self) -> Result<&str> {
        match self.mechanism.as_deref() {
            Some(m) => Ok(m),
            None => param_err!("{} requires --mech", self.kind),
        }
    }

    pub fn need_k(&self) -> Result<u64> {
        match self.k {
            Some(k) => Ok(k),
            None => param_err!("{} requires --k", self.kind),
        }
    }

    pub fn need_t(&self) -> Result<usize> {
        match self.t {
            Some(t) => Ok(t),
            None => param_err!("{} requires --T", self.kind),
        }
    }

    pub fn need_eps(&self) -> Result<f64> {
        match self.eps {
            Some(e) => Ok(e),
            None => param_err!("{} requires --eps", self.kind),
        }
    }

    pub fn need_delta(&self) -> Result<f64> {
        match self.delta {
            Some(d) => Ok(d),
            None => param_err!("{} requires --delta", self.kind),
        }
    }

    pub fn need_n(&self) -> Result<u64> {
        match self.n {
            Some(n) => Ok(n),
            None => param_err!("{} requires --N", self.kind),
        }
    }
}

/// Parse a worker-count cap from the `DPLAB_THREADS` environment variable's
/// value. `None` (variable unset) means "no cap". The binary feeds the
/// result to rayon's global pool builder at startup.
pub fn thread_cap(raw: Option<&str>) -> Result<Option<usize>> {
    match raw {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(0) => param_err!("DPLAB_THREADS must be positive"),
            Ok(n) => Ok(Some(n)),
            Err(_) => param_err!("DPLAB_THREADS must be a positive integer, got {s:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        let kinds = [
            ExperimentKind::AttackMonitor,
            ExperimentKind::CounterBench,
            ExperimentKind::Ladder,
            ExperimentKind::MirrorAudit,
            ExperimentKind::PredictorBench,
            ExperimentKind::LearnerAttack,
            ExperimentKind::AdaptQueries,
        ];
        for kind in kinds {
            assert_eq!(ExperimentKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(ExperimentKind::parse("frobnicate").is_err());
        println!("[PASS] experiment kind names round-trip through parse");
    }

    #[test]
    fn missing_parameters_name_their_flag() {
        let cfg = ExperimentConfig::new(ExperimentKind::MirrorAudit);
        let err = cfg.need_eps().unwrap_err();
        assert!(err.to_string().contains("--eps"), "got {err}");
        let err = cfg.need_n().unwrap_err();
        assert!(err.to_string().contains("--N"), "got {err}");
        assert!(cfg.need_mechanism().is_err());
        assert!(cfg.need_k().is_err());
        assert!(cfg.need_t().is_err());
        assert!(cfg.need_delta().is_err());
        println!("[PASS] missing config fields report the responsible flag");
    }

    #[test]
    fn thread_cap_parses_and_rejects() {
        assert_eq!(thread_cap(None).unwrap(), None);
        assert_eq!(thread_cap(Some("4")).unwrap(), Some(4));
        assert_eq!(thread_cap(Some(" 12 ")).unwrap(), Some(12));
        assert!(thread_cap(Some("0")).is_err());
        assert!(thread_cap(Some("-3")).is_err());
        assert!(thread_cap(Some("many")).is_err());
        println!("[PASS] DPLAB_THREADS parsing accepts positives and rejects junk");
    }
}
