//! Coherent feedback: the induced plant map against `Tr_c[U(ρ⊗ρ_c)U†]`.
//!
//! Presets: `swap` (controller in |0⟩, plant reset to |0⟩), `decoupled`
//! (`U = V⊗W`, plant channel must equal conjugation by `V`), `random`.

use std::time::Instant;

use anyhow::{bail, ensure};
use serde::{Deserialize, Serialize};

use kraus_landscape::feedback::coherent::swap;
use kraus_landscape::feedback::{
    coherent_induced_map, coherent_reduced_state, CoherentFeedbackSetup,
};
use kraus_landscape::kraus::{apply, map_distance, validate};
use kraus_landscape::matrix::JsonMatrix;
use kraus_landscape::random::{random_density, random_pure_state, random_unitary};
use kraus_landscape::state::{tensor_product, trace_distance};
use kraus_landscape::{DensityMatrix, KrausMap, SeededRng};

use crate::config::StateSpec;
use crate::report;
use crate::Invocation;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSetup {
    pub unitary: JsonMatrix,
    pub controller_state: StateSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetupSpec {
    Preset(String),
    Explicit(ExplicitSetup),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoherentConfig {
    pub seed: u64,
    pub setup: SetupSpec,
    pub plant_dim: usize,
    pub ctrl_dim: usize,
    /// Number of setups drawn for the random and decoupled presets.
    pub setups: usize,
    /// Random plant states checked per setup.
    pub states: usize,
    pub tolerance: f64,
}

impl Default for CoherentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            setup: SetupSpec::Preset("random".into()),
            plant_dim: 2,
            ctrl_dim: 2,
            setups: 100,
            states: 10,
            tolerance: 1e-10,
        }
    }
}

/// What the induced map should equal, when a preset pins it down.
enum Expected {
    Channel(KrausMap),
    Output(DensityMatrix),
}

#[derive(Serialize)]
struct Results {
    setups: usize,
    states_per_setup: usize,
    operators: Vec<usize>,
    maps_valid: bool,
    max_distance: f64,
    /// Distance to the preset's known answer, if it has one.
    max_reference_distance: Option<f64>,
}

pub fn run(inv: &Invocation) -> anyhow::Result<bool> {
    let started = Instant::now();
    let mut cfg: CoherentConfig = crate::config::load(inv.config.as_deref())?;
    if let Some(seed) = inv.seed {
        cfg.seed = seed;
    }
    let (np, nc) = (cfg.plant_dim, cfg.ctrl_dim);
    ensure!(
        np >= 1 && nc >= 1,
        "plant_dim and ctrl_dim must be positive"
    );
    ensure!(
        cfg.setups >= 1 && cfg.states >= 1,
        "setups and states must be at least 1"
    );
    ensure!(cfg.tolerance > 0.0, "tolerance must be positive");

    let mut rng = SeededRng::new(cfg.seed, 0);
    let count = match &cfg.setup {
        SetupSpec::Preset(p) if p == "random" || p == "decoupled" => cfg.setups,
        _ => 1,
    };
    let mut operators = Vec::new();
    let mut maps_valid = true;
    let mut max_distance = 0.0f64;
    let mut max_reference: Option<f64> = None;

    for _ in 0..count {
        let (setup, expected) = match &cfg.setup {
            SetupSpec::Preset(p) => match p.as_str() {
                "swap" => {
                    ensure!(np == nc, "swap needs plant_dim == ctrl_dim");
                    let ctrl = DensityMatrix::basis_state(nc, 0);
                    let setup = CoherentFeedbackSetup::new(np, nc, swap(np), ctrl.clone())?;
                    (setup, Some(Expected::Output(ctrl)))
                }
                "decoupled" => {
                    let v = random_unitary(np, &mut rng);
                    let w = random_unitary(nc, &mut rng);
                    let ctrl = random_pure_state(nc, &mut rng);
                    let setup = CoherentFeedbackSetup::new(np, nc, tensor_product(&v, &w), ctrl)?;
                    (setup, Some(Expected::Channel(KrausMap::unitary(v)?)))
                }
                "random" => {
                    let u = random_unitary(np * nc, &mut rng);
                    let ctrl = random_pure_state(nc, &mut rng);
                    (CoherentFeedbackSetup::new(np, nc, u, ctrl)?, None)
                }
                other => bail!("unknown coherent setup preset {other:?}"),
            },
            SetupSpec::Explicit(e) => {
                let ctrl = e.controller_state.resolve(nc, &mut rng)?;
                (
                    CoherentFeedbackSetup::new(np, nc, e.unitary.0.clone(), ctrl)?,
                    None,
                )
            }
        };

        let phi = coherent_induced_map(&setup)?;
        operators.push(phi.rank());
        maps_valid &= validate(&phi).passed();
        if let Some(Expected::Channel(target)) = &expected {
            let d = map_distance(&phi, target)?;
            max_reference = Some(max_reference.unwrap_or(0.0).max(d));
        }
        for _ in 0..cfg.states {
            let rho = random_density(np, &mut rng);
            let via_map = apply(&phi, &rho)?;
            let oracle = coherent_reduced_state(&setup, &rho)?;
            max_distance = max_distance.max(trace_distance(&via_map, &oracle)?);
            if let Some(Expected::Output(target)) = &expected {
                let d = trace_distance(&via_map, target)?;
                max_reference = Some(max_reference.unwrap_or(0.0).max(d));
            }
        }
    }

    let passed = maps_valid
        && max_distance <= cfg.tolerance
        && max_reference.is_none_or(|d| d <= cfg.tolerance);
    let results = Results {
        setups: count,
        states_per_setup: cfg.states,
        operators,
        maps_valid,
        max_distance,
        max_reference_distance: max_reference,
    };
    report::write(&inv.out, "coherent", &cfg, started, passed, &results)?;
    Ok(passed)
}
