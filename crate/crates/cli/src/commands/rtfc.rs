//! Real-time feedback: Monte Carlo trajectory averages against the
//! averaged Kraus map of the process.

use std::time::Instant;

use anyhow::{bail, ensure};
use serde::{Deserialize, Serialize};

use kraus_landscape::feedback::{
    monte_carlo_average, process_map, random_process, FeedbackIteration, FeedbackProcess,
};
use kraus_landscape::kraus::apply;
use kraus_landscape::matrix::{pauli_x, pauli_z};
use kraus_landscape::measurement::projective_from_observable;
use kraus_landscape::state::trace_distance;
use kraus_landscape::{KrausMap, Observable, SeededRng};

use crate::config::StateSpec;
use crate::report;
use crate::Invocation;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomProcess {
    pub dim: usize,
    pub iterations: usize,
    pub outcomes: usize,
    pub per_outcome: usize,
    pub action_rank: usize,
}

impl Default for RandomProcess {
    fn default() -> Self {
        Self {
            dim: 2,
            iterations: 3,
            outcomes: 2,
            per_outcome: 2,
            action_rank: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomWrapper {
    pub random: RandomProcess,
}

/// `"reset"` (measure σz, flip on −1, twice), `{"random": {...}}`, or an
/// explicit process `{"iterations": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProcessSpec {
    Preset(String),
    Random(RandomWrapper),
    Explicit(FeedbackProcess),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RtfcConfig {
    pub seed: u64,
    pub process: ProcessSpec,
    pub initial_state: StateSpec,
    pub trials: usize,
    /// Largest accepted trace distance at `trials`.
    pub bound: f64,
    /// Smaller trial count whose distance must not beat the main one.
    pub compare_trials: Option<usize>,
}

impl Default for RtfcConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            process: ProcessSpec::Random(RandomWrapper {
                random: RandomProcess::default(),
            }),
            initial_state: StateSpec::default(),
            trials: 10_000,
            bound: 0.05,
            compare_trials: Some(100),
        }
    }
}

#[derive(Serialize)]
struct Results {
    dim: usize,
    iterations: usize,
    trials: usize,
    distance: f64,
    max_stderr: Option<f64>,
    within_bound: bool,
    compare_trials: Option<usize>,
    compare_distance: Option<f64>,
    shrinks: Option<bool>,
}

fn reset_process() -> FeedbackProcess {
    let m = projective_from_observable(&Observable::new(pauli_z()).expect("Pauli Z is Hermitian"));
    let policy = vec![
        KrausMap::identity(2),
        KrausMap::unitary(pauli_x()).expect("Pauli X is unitary"),
    ];
    let it = FeedbackIteration::new(m, policy).expect("policy covers both outcomes");
    FeedbackProcess::new(vec![it.clone(), it]).expect("non-empty process")
}

fn build(spec: &ProcessSpec, rng: &mut SeededRng) -> anyhow::Result<FeedbackProcess> {
    Ok(match spec {
        ProcessSpec::Preset(p) if p == "reset" => reset_process(),
        ProcessSpec::Preset(p) => bail!("unknown process preset {p:?}"),
        ProcessSpec::Random(w) => {
            let r = &w.random;
            ensure!(
                r.dim >= 1
                    && r.iterations >= 1
                    && r.outcomes >= 1
                    && r.per_outcome >= 1
                    && r.action_rank >= 1,
                "random process parameters must be positive"
            );
            random_process(
                r.dim,
                r.iterations,
                r.outcomes,
                r.per_outcome,
                r.action_rank,
                rng,
            )
        }
        ProcessSpec::Explicit(p) => p.clone(),
    })
}

pub fn run(inv: &Invocation) -> anyhow::Result<bool> {
    let started = Instant::now();
    let mut cfg: RtfcConfig = crate::config::load(inv.config.as_deref())?;
    if let Some(seed) = inv.seed {
        cfg.seed = seed;
    }
    ensure!(cfg.trials >= 1, "trials must be at least 1");
    ensure!(
        cfg.compare_trials != Some(0),
        "compare_trials must be at least 1"
    );
    ensure!(cfg.bound > 0.0, "bound must be positive");
    cfg.initial_state.check()?;

    let process = build(&cfg.process, &mut SeededRng::new(cfg.seed, 1))?;
    let n = process.dim();
    let rho0 = cfg
        .initial_state
        .resolve(n, &mut SeededRng::new(cfg.seed, 2))?;
    let exact = apply(&process_map(&process)?, &rho0)?;

    let est = monte_carlo_average(&process, &rho0, cfg.trials, &SeededRng::new(cfg.seed, 3))?;
    let distance = trace_distance(&est.mean, &exact)?;
    let compare_distance = match cfg.compare_trials {
        Some(m) => {
            let small = monte_carlo_average(&process, &rho0, m, &SeededRng::new(cfg.seed, 4))?;
            Some(trace_distance(&small.mean, &exact)?)
        }
        None => None,
    };
    let within_bound = distance <= cfg.bound;
    let shrinks = compare_distance.map(|d| distance <= d);
    let passed = within_bound && shrinks.unwrap_or(true);

    let results = Results {
        dim: n,
        iterations: process.len(),
        trials: cfg.trials,
        distance,
        max_stderr: est.max_stderr(),
        within_bound,
        compare_trials: cfg.compare_trials,
        compare_distance,
        shrinks,
    };
    report::write(&inv.out, "rtfc", &cfg, started, passed, &results)?;
    Ok(passed)
}
