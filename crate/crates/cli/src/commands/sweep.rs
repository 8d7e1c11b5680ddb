//! Multi-start ascent for each requested dimension.
//!
//! Writes `sweep_n{n}.csv` (one row per start), `sweep_traces.json` and the
//! `sweep.json` report. Passes iff every start ends within `tolerance` of
//! `λ_max`.

use std::time::Instant;

use anyhow::{ensure, Context};
use serde::{Deserialize, Serialize};

use kraus_landscape::landscape::{sweep, AscentConfig, Objective};
use kraus_landscape::SeededRng;

use crate::config::{ObservableSpec, StateSpec};
use crate::report;
use crate::Invocation;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub starts: usize,
    pub observable: ObservableSpec,
    pub initial_state: StateSpec,
    pub tolerance: f64,
    pub ascent: AscentConfig,
    pub save_traces: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dims: vec![2],
            starts: 50,
            observable: ObservableSpec::Preset("random".into()),
            initial_state: StateSpec::default(),
            tolerance: 1e-4,
            ascent: AscentConfig::default(),
            save_traces: true,
        }
    }
}

#[derive(Serialize)]
struct DimensionResult {
    dim: usize,
    operators: usize,
    lambda_max: f64,
    min_j: f64,
    median_j: f64,
    max_j: f64,
    fraction_at_optimum: f64,
    fraction_converged: f64,
    mean_iterations: f64,
    max_iterations: usize,
    csv: String,
}

#[derive(Serialize)]
struct Trace<'a> {
    dim: usize,
    seed: u64,
    j_trace: &'a [f64],
}

pub fn run(inv: &Invocation) -> anyhow::Result<bool> {
    let started = Instant::now();
    let mut cfg: SweepConfig = crate::config::load(inv.config.as_deref())?;
    if let Some(seed) = inv.seed {
        cfg.seed = seed;
    }
    ensure!(cfg.starts >= 1, "starts must be at least 1");
    ensure!(!cfg.dims.is_empty(), "dims must not be empty");
    ensure!(cfg.dims.iter().all(|&n| n >= 1), "dims must be positive");
    ensure!(cfg.tolerance > 0.0, "tolerance must be positive");
    cfg.ascent.validate()?;
    cfg.initial_state.check()?;
    if let Some(f) = cfg.observable.fixed_dim()? {
        ensure!(
            cfg.dims.iter().all(|&n| n == f),
            "observable has dimension {f} but dims = {:?}",
            cfg.dims
        );
    }

    let mut dims = Vec::new();
    let mut traces = Vec::new();
    let mut passed = true;
    for &n in &cfg.dims {
        let mut rng = SeededRng::new(cfg.seed, n as u64);
        let a = cfg.observable.resolve(Some(n), &mut rng)?;
        let rho0 = cfg.initial_state.resolve(n, &mut rng)?;
        let obj = Objective::new(a, rho0)?;
        let starts = SeededRng::new(cfg.seed, 1_000 + n as u64);
        let s = sweep(&obj, cfg.starts, &cfg.ascent, cfg.tolerance, &starts)
            .with_context(|| format!("sweep at n = {n}"))?;

        let csv = format!("sweep_n{n}.csv");
        report::write_text(&inv.out.join(&csv), &s.to_csv())?;
        passed &= s.trap_free();
        if cfg.save_traces {
            traces.extend(s.runs.iter().map(|r| (n, r.seed, r.j_trace.clone())));
        }
        dims.push(DimensionResult {
            dim: n,
            operators: s.operators,
            lambda_max: s.optimum,
            min_j: s.min_j,
            median_j: s.median_j,
            max_j: s.max_j,
            fraction_at_optimum: s.fraction_at_optimum,
            fraction_converged: s.fraction_converged,
            mean_iterations: s.mean_iterations,
            max_iterations: s.max_iterations,
            csv,
        });
    }

    if cfg.save_traces {
        let traces: Vec<Trace> = traces
            .iter()
            .map(|(dim, seed, t)| Trace {
                dim: *dim,
                seed: *seed,
                j_trace: t,
            })
            .collect();
        report::write_json(&inv.out.join("sweep_traces.json"), &traces)?;
    }
    report::write(&inv.out, "sweep", &cfg, started, passed, &dims)?;
    Ok(passed)
}
