//! The constant-output map preparing the top eigenvector of `Â`, checked
//! over random initial states.

use std::time::Instant;

use anyhow::ensure;
use serde::{Deserialize, Serialize};

use kraus_landscape::kraus::apply;
use kraus_landscape::landscape::{objective_value, universal_map, Objective};
use kraus_landscape::random::random_density;
use kraus_landscape::spectral::spectral_decompose;
use kraus_landscape::state::trace_distance;
use kraus_landscape::{KrausMap, SeededRng};

use crate::config::ObservableSpec;
use crate::report;
use crate::Invocation;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniversalConfig {
    pub seed: u64,
    pub observable: ObservableSpec,
    /// Needed by the `identity` and `random` presets.
    pub dim: Option<usize>,
    pub states: usize,
    pub tolerance: f64,
}

impl Default for UniversalConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            observable: ObservableSpec::Preset("sigma_z".into()),
            dim: None,
            states: 100,
            tolerance: 1e-10,
        }
    }
}

#[derive(Serialize)]
struct Results {
    dim: usize,
    lambda_max: f64,
    multiplicity: usize,
    note: Option<String>,
    max_pairwise_distance: f64,
    max_objective_gap: f64,
    map: KrausMap,
}

pub fn run(inv: &Invocation) -> anyhow::Result<bool> {
    let started = Instant::now();
    let mut cfg: UniversalConfig = crate::config::load(inv.config.as_deref())?;
    if let Some(seed) = inv.seed {
        cfg.seed = seed;
    }
    ensure!(cfg.states >= 1, "states must be at least 1");
    ensure!(cfg.tolerance > 0.0, "tolerance must be positive");

    let mut rng = SeededRng::new(cfg.seed, 0);
    let a = cfg.observable.resolve(cfg.dim, &mut rng)?;
    let n = a.dim();
    let spec = spectral_decompose(&a);
    let multiplicity = spec.groups[0].len();
    let lambda_max = spec.eigenvalues[0];
    let phi = universal_map(&a);

    let mut outputs = Vec::with_capacity(cfg.states);
    let mut gap = 0.0f64;
    for _ in 0..cfg.states {
        let rho0 = random_density(n, &mut rng);
        let obj = Objective::new(a.clone(), rho0.clone())?;
        gap = gap.max((objective_value(&obj, &phi)? - lambda_max).abs());
        outputs.push(apply(&phi, &rho0)?);
    }
    let mut spread = 0.0f64;
    for i in 0..outputs.len() {
        for j in i + 1..outputs.len() {
            spread = spread.max(trace_distance(&outputs[i], &outputs[j])?);
        }
    }

    let note = (multiplicity > 1).then(|| {
        format!(
            "λ_max has multiplicity {multiplicity}; any state in its eigenspace is optimal, \
             the canonical first basis vector of the eigenspace is prepared"
        )
    });
    let passed = spread <= cfg.tolerance && gap <= cfg.tolerance;
    let results = Results {
        dim: n,
        lambda_max,
        multiplicity,
        note,
        max_pairwise_distance: spread,
        max_objective_gap: gap,
        map: phi,
    };
    report::write(&inv.out, "universal", &cfg, started, passed, &results)?;
    Ok(passed)
}
