use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kraus::{canonicalize, compose, random_kraus, KrausMap};
use crate::matrix::{ensure_dim, CMatrix};
use crate::measurement::{random_measurement, GeneralizedMeasurement};

/// Measurement `O^i` followed by the outcome-conditioned map `Λ^i_α`.
/// The durations are carried along but never enter a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IterationJson", into = "IterationJson")]
pub struct FeedbackIteration {
    measurement: GeneralizedMeasurement,
    policy: Vec<KrausMap>,
    pub tau_m: f64,
    pub tau_f: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IterationJson {
    measurement: GeneralizedMeasurement,
    policy: BTreeMap<String, KrausMap>,
    #[serde(default)]
    tau_m: f64,
    #[serde(default)]
    tau_f: f64,
}

impl TryFrom<IterationJson> for FeedbackIteration {
    type Error = Error;
    fn try_from(j: IterationJson) -> Result<Self> {
        let mut by_index = BTreeMap::new();
        for (key, map) in j.policy {
            let alpha: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("policy key {key:?} is not an index")))?;
            by_index.insert(alpha, map);
        }
        if by_index.keys().copied().ne(0..by_index.len()) {
            return Err(Error::Invalid(
                "policy keys must be the outcome indices 0..N0".into(),
            ));
        }
        let mut it = FeedbackIteration::new(j.measurement, by_index.into_values().collect())?;
        it.tau_m = j.tau_m;
        it.tau_f = j.tau_f;
        Ok(it)
    }
}

impl From<FeedbackIteration> for IterationJson {
    fn from(it: FeedbackIteration) -> Self {
        IterationJson {
            measurement: it.measurement,
            policy: it
                .policy
                .into_iter()
                .enumerate()
                .map(|(a, m)| (a.to_string(), m))
                .collect(),
            tau_m: it.tau_m,
            tau_f: it.tau_f,
        }
    }
}

impl FeedbackIteration {
    /// `policy[α]` is applied after outcome `α`; one map per outcome.
    pub fn new(measurement: GeneralizedMeasurement, policy: Vec<KrausMap>) -> Result<Self> {
        if policy.len() != measurement.num_outcomes() {
            return Err(Error::Invalid(format!(
                "policy covers {} outcomes, measurement has {}",
                policy.len(),
                measurement.num_outcomes()
            )));
        }
        for map in &policy {
            ensure_dim(measurement.dim(), map.dim())?;
        }
        Ok(Self {
            measurement,
            policy,
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

    pub fn action(&self, alpha: usize) -> &KrausMap {
        &self.policy[alpha]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProcessJson", into = "ProcessJson")]
pub struct FeedbackProcess {
    iterations: Vec<FeedbackIteration>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcessJson {
    iterations: Vec<FeedbackIteration>,
}

impl TryFrom<ProcessJson> for FeedbackProcess {
    type Error = Error;
    fn try_from(j: ProcessJson) -> Result<Self> {
        FeedbackProcess::new(j.iterations)
    }
}

impl From<FeedbackProcess> for ProcessJson {
    fn from(p: FeedbackProcess) -> Self {
        ProcessJson {
            iterations: p.iterations,
        }
    }
}

impl FeedbackProcess {
    pub fn new(iterations: Vec<FeedbackIteration>) -> Result<Self> {
        let first = iterations.first().ok_or_else(|| {
            Error::Invalid("a feedback process needs at least one iteration".into())
        })?;
        for it in &iterations {
            ensure_dim(first.dim(), it.dim())?;
        }
        Ok(Self { iterations })
    }

    pub fn dim(&self) -> usize {
        self.iterations[0].dim()
    }

    pub fn iterations(&self) -> &[FeedbackIteration] {
        &self.iterations
    }

    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }
}

/// Outcome-averaged iteration: operators `Z_{ν,α,β} = L_{ν,α} K_{α,β}`,
/// ordered by `α`, then `ν`, then `β`.
pub fn iteration_map(it: &FeedbackIteration) -> Result<KrausMap> {
    let m = &it.measurement;
    let mut ops: Vec<CMatrix> = Vec::new();
    for (alpha, action) in it.policy.iter().enumerate() {
        ensure_dim(m.dim(), action.dim())?;
        for l in action.operators() {
            for k in m.operators(alpha) {
                ops.push(l * k);
            }
        }
    }
    KrausMap::new(ops)
}

/// `Φ_F = Φ^N ∘ … ∘ Φ^1`, canonicalized to at most `n²` operators.
pub fn process_map(process: &FeedbackProcess) -> Result<KrausMap> {
    let mut iter = process.iterations.iter();
    let mut acc = iteration_map(iter.next().expect("nonempty process"))?;
    for it in iter {
        acc = compose(&iteration_map(it)?, &acc)?;
    }
    let n = acc.dim();
    if acc.rank() > n * n {
        canonicalize(&acc)
    } else {
        Ok(acc)
    }
}

/// Random process: each iteration measures with `outcomes × per_outcome`
/// random operators and answers with a random map of rank `action_rank`.
pub fn random_process<R: Rng + ?Sized>(
    n: usize,
    iterations: usize,
    outcomes: usize,
    per_outcome: usize,
    action_rank: usize,
    rng: &mut R,
) -> FeedbackProcess {
    let its = (0..iterations)
        .map(|_| {
            let m = random_measurement(n, outcomes, per_outcome, rng);
            let policy = (0..outcomes)
                .map(|_| random_kraus(n, action_rank, rng))
                .collect();
            FeedbackIteration::new(m, policy).expect("consistent dimensions")
        })
        .collect();
    FeedbackProcess::new(its).expect("at least one iteration")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::kraus::{apply, map_distance, validate};
    use crate::matrix::{c, pauli_x, pauli_z};
    use crate::measurement::{probabilities, projective_from_observable, selective_update};
    use crate::random::random_density;
    use crate::rng::SeededRng;
    use crate::state::{DensityMatrix, Observable};
    use proptest::prelude::*;

    /// Measure σz; on −1 flip with X. Prepares |0⟩ from anything.
    pub(crate) fn reset_iteration() -> FeedbackIteration {
        let m = projective_from_observable(&Observable::new(pauli_z()).unwrap());
        FeedbackIteration::new(
            m,
            vec![KrausMap::identity(2), KrausMap::unitary(pauli_x()).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn reset_iteration_prepares_ground_state() {
        let phi = iteration_map(&reset_iteration()).unwrap();
        let mut rng = SeededRng::new(0, 0);
        for _ in 0..20 {
            let out = apply(&phi, &random_density(2, &mut rng)).unwrap();
            assert!((out.matrix() - DensityMatrix::basis_state(2, 0).matrix()).norm() < 1e-14);
        }
    }

    #[test]
    fn trivial_measurement_passes_policy_through() {
        let lambda = random_kraus(3, 4, &mut SeededRng::new(1, 0));
        let it = FeedbackIteration::new(GeneralizedMeasurement::trivial(3), vec![lambda.clone()])
            .unwrap();
        assert!(map_distance(&iteration_map(&it).unwrap(), &lambda).unwrap() < 1e-14);
    }

    #[test]
    fn iteration_map_is_outcome_average() {
        let mut rng = SeededRng::new(2, 0);
        let process = random_process(3, 1, 3, 2, 2, &mut rng);
        let it = &process.iterations()[0];
        let rho = random_density(3, &mut rng);
        let phi = iteration_map(it).unwrap();
        assert!(validate(&phi).tp_residual <= 1e-10);
        let p = probabilities(it.measurement(), &rho).unwrap();
        let mut oracle = CMatrix::zeros(3, 3);
        for (a, &pa) in p.iter().enumerate() {
            let post = selective_update(it.measurement(), &rho, a)
                .unwrap()
                .post_state;
            oracle += apply(it.action(a), &post).unwrap().matrix() * c(pa, 0.0);
        }
        assert!((apply(&phi, &rho).unwrap().matrix() - oracle).norm() <= 1e-10);
    }

    #[test]
    fn process_map_cases() {
        let single = FeedbackProcess::new(vec![reset_iteration()]).unwrap();
        let d = map_distance(
            &process_map(&single).unwrap(),
            &iteration_map(&reset_iteration()).unwrap(),
        )
        .unwrap();
        assert!(d < 1e-14);

        let twice = FeedbackProcess::new(vec![reset_iteration(), reset_iteration()]).unwrap();
        let phi = process_map(&twice).unwrap();
        let out = apply(&phi, &random_density(2, &mut SeededRng::new(3, 0))).unwrap();
        assert!((out.matrix() - DensityMatrix::basis_state(2, 0).matrix()).norm() < 1e-12);
    }

    #[test]
    fn policy_must_cover_outcomes() {
        let m = projective_from_observable(&Observable::new(pauli_z()).unwrap());
        assert!(FeedbackIteration::new(m, vec![KrausMap::identity(2)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = random_process(2, 2, 2, 1, 2, &mut SeededRng::new(4, 0));
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with("{\"iterations\":[{\"measurement\":"));
        assert!(s.contains("\"policy\":{\"0\":{\"n\":2,\"operators\":"));
        let back: FeedbackProcess = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let extra = s.replacen("\"tau_m\"", "\"bogus\":1,\"tau_m\"", 1);
        assert!(serde_json::from_str::<FeedbackProcess>(&extra).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn process_map_matches_sequential(seed in any::<u64>(), n in 2usize..4, len in 1usize..5) {
            let mut rng = SeededRng::new(seed, 0);
            let process = random_process(n, len, 2, 2, 2, &mut rng);
            let phi = process_map(&process).unwrap();
            prop_assert!(phi.rank() <= n * n);
            let rho = random_density(n, &mut rng);
            let mut seq = rho.clone();
            for it in process.iterations() {
                let step = iteration_map(it).unwrap();
                prop_assert!(step.tp_residual() <= 1e-10);
                seq = apply(&step, &seq).unwrap();
            }
            let direct = apply(&phi, &rho).unwrap();
            prop_assert!((direct.matrix() - seq.matrix()).norm() <= 1e-9);
        }
    }
}
