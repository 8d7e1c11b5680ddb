//! Structural checks on Kraus maps and measurements. Supplied objects are
//! loaded without enforcing trace preservation so that defects show up in
//! the report instead of as parse errors.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use rand::Rng;
use serde::{Deserialize, Serialize};

use kraus_landscape::kraus::{random_kraus, validate, ValidationReport};
use kraus_landscape::matrix::{identity, JsonMatrix};
use kraus_landscape::measurement::random_measurement;
use kraus_landscape::{CMatrix, Error, GeneralizedMeasurement, KrausMap, SeededRng};

use crate::report;
use crate::Invocation;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetMap {
    /// `"identity"` or `"depolarizing"`.
    pub preset: String,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitMap {
    pub operators: Vec<JsonMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    Preset(PresetMap),
    Explicit(ExplicitMap),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    pub outcomes: Vec<f64>,
    /// Keys `"alpha,beta"`.
    pub operators: BTreeMap<String, JsonMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomBatch {
    pub count: usize,
    pub dims: Vec<usize>,
    /// Upper bound on operators per sampled map; `n²` when absent.
    pub max_operators: Option<usize>,
}

impl Default for RandomBatch {
    fn default() -> Self {
        Self {
            count: 100,
            dims: vec![2, 3, 4],
            max_operators: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub measurements: Vec<MeasurementSpec>,
    #[serde(default)]
    pub random: Option<RandomBatch>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            maps: Vec::new(),
            measurements: Vec::new(),
            random: Some(RandomBatch::default()),
        }
    }
}

#[derive(Serialize)]
struct MapResult {
    source: String,
    #[serde(flatten)]
    report: ValidationReport,
}

#[derive(Serialize)]
struct MeasurementResult {
    source: String,
    dim: usize,
    outcomes: usize,
    completeness_residual: f64,
    passed: bool,
}

#[derive(Serialize)]
struct Results {
    maps_checked: usize,
    maps_failed: usize,
    measurements_checked: usize,
    measurements_failed: usize,
    maps: Vec<MapResult>,
    measurements: Vec<MeasurementResult>,
}

fn build_map(spec: &MapSpec) -> anyhow::Result<KrausMap> {
    Ok(match spec {
        MapSpec::Preset(p) => {
            ensure!(p.n >= 1, "map dimension must be positive");
            match p.preset.as_str() {
                "identity" => KrausMap::identity(p.n),
                "depolarizing" => KrausMap::completely_depolarizing(p.n),
                other => bail!("unknown map preset {other:?}"),
            }
        }
        MapSpec::Explicit(e) => {
            KrausMap::from_operators_unchecked(e.operators.iter().map(|m| m.0.clone()).collect())?
        }
    })
}

fn parse_key(key: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = key
        .split_once(',')
        .with_context(|| format!("operator key {key:?} is not \"alpha,beta\""))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn check_measurement(spec: &MeasurementSpec, source: String) -> anyhow::Result<MeasurementResult> {
    let mut grouped: Vec<BTreeMap<usize, CMatrix>> = vec![BTreeMap::new(); spec.outcomes.len()];
    for (key, m) in &spec.operators {
        let (alpha, beta) = parse_key(key)?;
        let slot = grouped
            .get_mut(alpha)
            .with_context(|| format!("operator key {key:?} refers to a missing outcome"))?;
        slot.insert(beta, m.0.clone());
    }
    let ops: Vec<Vec<CMatrix>> = grouped
        .into_iter()
        .map(|g| g.into_values().collect())
        .collect();
    let n = ops
        .iter()
        .flatten()
        .next()
        .map(|k| k.ncols())
        .context("measurement has no operators")?;
    for k in ops.iter().flatten() {
        ensure!(
            k.shape() == (n, n),
            "measurement operators must all be {n}×{n}"
        );
    }
    let effect_sum = ops
        .iter()
        .flatten()
        .fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
    let residual = (effect_sum - identity(n)).norm();
    let passed = match GeneralizedMeasurement::new(spec.outcomes.clone(), ops) {
        Ok(_) => true,
        Err(Error::NotTracePreserving { .. }) => false,
        Err(e) => return Err(e.into()),
    };
    Ok(MeasurementResult {
        source,
        dim: n,
        outcomes: spec.outcomes.len(),
        completeness_residual: residual,
        passed,
    })
}

fn sampled_measurement_result(m: &GeneralizedMeasurement, source: String) -> MeasurementResult {
    let n = m.dim();
    let sum = (0..m.num_outcomes()).fold(CMatrix::zeros(n, n), |acc, a| acc + m.effect(a));
    let residual = (sum - identity(n)).norm();
    MeasurementResult {
        source,
        dim: n,
        outcomes: m.num_outcomes(),
        completeness_residual: residual,
        passed: residual <= kraus_landscape::tol::TRACE_PRESERVING,
    }
}

pub fn run(inv: &Invocation) -> anyhow::Result<bool> {
    let started = Instant::now();
    let mut cfg: ValidateConfig = crate::config::load(inv.config.as_deref())?;
    if let Some(seed) = inv.seed {
        cfg.seed = seed;
    }
    if let Some(batch) = &cfg.random {
        ensure!(!batch.dims.is_empty(), "random.dims must not be empty");
        ensure!(
            batch.dims.iter().all(|&n| n >= 1),
            "random.dims must be positive"
        );
        ensure!(
            batch.max_operators != Some(0),
            "random.max_operators must be positive"
        );
    }
    ensure!(
        !cfg.maps.is_empty()
            || !cfg.measurements.is_empty()
            || cfg.random.as_ref().is_some_and(|b| b.count > 0),
        "nothing to validate: supply maps, measurements or a random batch"
    );

    let mut maps = Vec::new();
    for (i, spec) in cfg.maps.iter().enumerate() {
        let phi = build_map(spec).with_context(|| format!("maps[{i}]"))?;
        maps.push(MapResult {
            source: format!("maps[{i}]"),
            report: validate(&phi),
        });
    }
    let mut measurements = Vec::new();
    for (i, spec) in cfg.measurements.iter().enumerate() {
        let source = format!("measurements[{i}]");
        measurements
            .push(check_measurement(spec, source).with_context(|| format!("measurements[{i}]"))?);
    }

    if let Some(batch) = &cfg.random {
        let mut rng = SeededRng::new(cfg.seed, 0);
        for k in 0..batch.count {
            let n = batch.dims[k % batch.dims.len()];
            let l = rng.random_range(1..=batch.max_operators.unwrap_or(n * n));
            maps.push(MapResult {
                source: format!("random[{k}] n={n} L={l}"),
                report: validate(&random_kraus(n, l, &mut rng)),
            });
            let outcomes = rng.random_range(1..=3);
            let per = rng.random_range(1..=2);
            let m = random_measurement(n, outcomes, per, &mut rng);
            measurements.push(sampled_measurement_result(&m, format!("random[{k}] n={n}")));
        }
    }

    let maps_failed = maps.iter().filter(|m| !m.report.passed()).count();
    let measurements_failed = measurements.iter().filter(|m| !m.passed).count();
    let passed = maps_failed == 0 && measurements_failed == 0;
    let results = Results {
        maps_checked: maps.len(),
        maps_failed,
        measurements_checked: measurements.len(),
        measurements_failed,
        maps,
        measurements,
    };
    report::write(&inv.out, "validate", &cfg, started, passed, &results)?;
    Ok(passed)
}
