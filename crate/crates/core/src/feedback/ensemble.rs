//! Feedback on an ensemble: the measurement acts nonselectively and the
//! action is chosen from the recorded mean `Ō = Σ_α p_α O_α`.
//!
//! `Ō` is taken exactly from the current density matrix. The map returned
//! by [`ensemble_process_map`] freezes the bin decisions made along the
//! trajectory of the supplied initial state; applied to a different state it
//! reproduces those decisions, not the ones that state would have triggered.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kraus::{apply, canonicalize, compose, KrausMap};
use crate::matrix::ensure_dim;
use crate::measurement::{nonselective_map, probabilities, GeneralizedMeasurement};
use crate::state::DensityMatrix;

/// Half-open bin `[lower, upper)`; a missing bound is infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackBin {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub map: KrausMap,
}

impl FeedbackBin {
    pub fn new(lower: Option<f64>, upper: Option<f64>, map: KrausMap) -> Self {
        Self { lower, upper, map }
    }

    pub fn everything(map: KrausMap) -> Self {
        Self::new(None, None, map)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower.is_none_or(|a| a <= x) && self.upper.is_none_or(|b| x < b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct EnsembleFeedbackIteration {
    measurement: GeneralizedMeasurement,
    bins: Vec<FeedbackBin>,
    pub tau_m: f64,
    pub tau_f: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleJson {
    measurement: GeneralizedMeasurement,
    bins: Vec<FeedbackBin>,
    #[serde(default)]
    tau_m: f64,
    #[serde(default)]
    tau_f: f64,
}

impl TryFrom<EnsembleJson> for EnsembleFeedbackIteration {
    type Error = Error;
    fn try_from(j: EnsembleJson) -> Result<Self> {
        let mut it = EnsembleFeedbackIteration::new(j.measurement, j.bins)?;
        it.tau_m = j.tau_m;
        it.tau_f = j.tau_f;
        Ok(it)
    }
}

impl From<EnsembleFeedbackIteration> for EnsembleJson {
    fn from(it: EnsembleFeedbackIteration) -> Self {
        EnsembleJson {
            measurement: it.measurement,
            bins: it.bins,
            tau_m: it.tau_m,
            tau_f: it.tau_f,
        }
    }
}

impl EnsembleFeedbackIteration {
    /// Bins are sorted by lower bound and must tile a single interval that
    /// contains every outcome value (the reachable range of `Ō`).
    pub fn new(measurement: GeneralizedMeasurement, mut bins: Vec<FeedbackBin>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::Invalid(
                "at least one feedback bin is required".into(),
            ));
        }
        for b in &bins {
            ensure_dim(measurement.dim(), b.map.dim())?;
            if let (Some(a), Some(c)) = (b.lower, b.upper) {
                if !(a < c) {
                    return Err(Error::Invalid(format!("empty bin [{a}, {c})")));
                }
            }
        }
        bins.sort_by(|x, y| match (x.lower, y.lower) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, _) => std::cmp::Ordering::Less,
            (_, None) => std::cmp::Ordering::Greater,
            (Some(a), Some(b)) => a.total_cmp(&b),
        });
        for pair in bins.windows(2) {
            if pair[0].upper.is_none() || pair[0].upper != pair[1].lower {
                return Err(Error::Invalid(
                    "feedback bins must be contiguous and non-overlapping".into(),
                ));
            }
        }
        let values = measurement.outcomes();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !bins[0].contains(lo) && bins[0].lower.is_some_and(|a| a > lo) {
            return Err(Error::Invalid(format!(
                "bins do not cover outcome value {lo}"
            )));
        }
        if bins.last().unwrap().upper.is_some_and(|b| b <= hi) {
            return Err(Error::Invalid(format!(
                "bins do not cover outcome value {hi}"
            )));
        }
        Ok(Self {
            measurement,
            bins,
            tau_m: 0.0,
            tau_f: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.measurement.dim()
    }

    pub fn measurement(&self) -> &GeneralizedMeasurement {
        &self.measurement
    }

    pub fn bins(&self) -> &[FeedbackBin] {
        &self.bins
    }

    /// `Ō = Σ_α p_α O_α` for the given state.
    pub fn mean_value(&self, rho: &DensityMatrix) -> Result<f64> {
        let p = probabilities(&self.measurement, rho)?;
        Ok(p.iter()
            .zip(self.measurement.outcomes())
            .map(|(p, o)| p * o)
            .sum())
    }

    pub fn select_bin(&self, mean: f64) -> Result<usize> {
        self.bins
            .iter()
            .position(|b| b.contains(mean))
            .ok_or(Error::UncoveredValue { value: mean })
    }
}

/// `Λ_Ō ∘ Ω_O` with `Ō` evaluated on `rho`.
pub fn ensemble_iteration_map(
    it: &EnsembleFeedbackIteration,
    rho: &DensityMatrix,
) -> Result<KrausMap> {
    let bin = it.select_bin(it.mean_value(rho)?)?;
    compose(&it.bins[bin].map, &nonselective_map(&it.measurement))
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleProcess {
    /// Composition of the per-step maps chosen along the trajectory of `rho0`.
    pub map: KrausMap,
    /// `Ō` observed at each step.
    pub means: Vec<f64>,
    /// Index of the selected bin at each step.
    pub bins: Vec<usize>,
    pub final_state: DensityMatrix,
}

pub fn ensemble_process_map(
    its: &[EnsembleFeedbackIteration],
    rho0: &DensityMatrix,
) -> Result<EnsembleProcess> {
    let first = its
        .first()
        .ok_or_else(|| Error::Invalid("an ensemble process needs at least one iteration".into()))?;
    ensure_dim(first.dim(), rho0.dim())?;
    let n = rho0.dim();
    let mut state = rho0.clone();
    let mut acc = KrausMap::identity(n);
    let mut means = Vec::with_capacity(its.len());
    let mut bins = Vec::with_capacity(its.len());
    for it in its {
        ensure_dim(n, it.dim())?;
        let mean = it.mean_value(&state)?;
        let bin = it.select_bin(mean)?;
        let step = compose(&it.bins[bin].map, &nonselective_map(&it.measurement))?;
        state = apply(&step, &state)?;
        acc = compose(&step, &acc)?;
        means.push(mean);
        bins.push(bin);
    }
    if acc.rank() > n * n {
        acc = canonicalize(&acc)?;
    }
    Ok(EnsembleProcess {
        map: acc,
        means,
        bins,
        final_state: state,
    })
}
