//! Generalized measurements `{O_α, K_{α,β}}`.
//!
//! Outcome `α` occurs with probability `p_α = Tr Σ_β K_{α,β} ρ K_{α,β}†`.
//! Observing it leaves the selective post-state `(1/p_α) Σ_β K ρ K†`;
//! ignoring it gives the nonselective map `Ω(ρ) = Σ_{α,β} K ρ K†`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kraus::{self, KrausMap};
use crate::matrix::{self, ensure_dim, ensure_square, CMatrix, JsonMatrix};
use crate::random::random_isometry;
use crate::spectral::spectral_decompose;
use crate::state::{DensityMatrix, Observable};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementJson", into = "MeasurementJson")]
pub struct GeneralizedMeasurement {
    n: usize,
    outcomes: Vec<f64>,
    /// `operators[α][β] = K_{α,β}`.
    operators: Vec<Vec<CMatrix>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurementJson {
    outcomes: Vec<f64>,
    operators: BTreeMap<String, JsonMatrix>,
}

fn parse_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("operator key {key:?} is not \"alpha,beta\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl TryFrom<MeasurementJson> for GeneralizedMeasurement {
    type Error = Error;
    fn try_from(j: MeasurementJson) -> Result<Self> {
        let mut grouped: Vec<BTreeMap<usize, CMatrix>> = vec![BTreeMap::new(); j.outcomes.len()];
        for (key, m) in j.operators {
            let (alpha, beta) = parse_key(&key)?;
            let slot = grouped.get_mut(alpha).ok_or_else(|| {
                Error::Invalid(format!("operator key {key:?} refers to a missing outcome"))
            })?;
            slot.insert(beta, m.0);
        }
        let mut operators = Vec::with_capacity(grouped.len());
        for (alpha, ops) in grouped.into_iter().enumerate() {
            if ops.keys().copied().ne(0..ops.len()) {
                return Err(Error::Invalid(format!(
                    "operators of outcome {alpha} must be numbered 0..k without gaps"
                )));
            }
            operators.push(ops.into_values().collect());
        }
        GeneralizedMeasurement::new(j.outcomes, operators)
    }
}

impl From<GeneralizedMeasurement> for MeasurementJson {
    fn from(m: GeneralizedMeasurement) -> Self {
        let mut operators = BTreeMap::new();
        for (alpha, ops) in m.operators.into_iter().enumerate() {
            for (beta, k) in ops.into_iter().enumerate() {
                operators.insert(format!("{alpha},{beta}"), JsonMatrix(k));
            }
        }
        MeasurementJson {
            outcomes: m.outcomes,
            operators,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub index: usize,
    pub value: f64,
    pub probability: f64,
    pub post_state: DensityMatrix,
}

impl GeneralizedMeasurement {
    pub fn new(outcomes: Vec<f64>, operators: Vec<Vec<CMatrix>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Invalid(
                "a measurement needs at least one outcome".into(),
            ));
        }
        if outcomes.len() != operators.len() {
            return Err(Error::Invalid(format!(
                "{} outcome values but {} operator families",
                outcomes.len(),
                operators.len()
            )));
        }
        if outcomes.iter().any(|o| !o.is_finite()) {
            return Err(Error::Invalid("outcome values must be finite".into()));
        }
        if operators.iter().any(Vec::is_empty) {
            return Err(Error::Invalid(
                "every outcome needs at least one operator".into(),
            ));
        }
        let n = ensure_square(&operators[0][0])?;
        for k in operators.iter().flatten() {
            ensure_dim(n, ensure_square(k)?)?;
        }
        let flat: Vec<CMatrix> = operators.iter().flatten().cloned().collect();
        let residual = kraus::tp_residual(&flat);
        if residual > tol::TRACE_PRESERVING {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self {
            n,
            outcomes,
            operators,
        })
    }

    /// `K_{α,β} = Π_α δ_{αβ}`.
    pub fn projective(outcomes: Vec<f64>, projectors: Vec<CMatrix>) -> Result<Self> {
        Self::new(outcomes, projectors.into_iter().map(|p| vec![p]).collect())
    }

    /// Single outcome with `K = I`; leaves every state untouched.
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            outcomes: vec![0.0],
            operators: vec![vec![matrix::identity(n)]],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn operators(&self, alpha: usize) -> &[CMatrix] {
        &self.operators[alpha]
    }

    fn branch(&self, alpha: usize, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, self.n);
        for k in &self.operators[alpha] {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// Effect `E_α = Σ_β K†K`.
    pub fn effect(&self, alpha: usize) -> CMatrix {
        self.operators[alpha]
            .iter()
            .fold(CMatrix::zeros(self.n, self.n), |acc, k| {
                acc + k.adjoint() * k
            })
    }

    /// `Ô = Σ_α O_α E_α`, whose expectation is the outcome mean.
    pub fn mean_observable(&self) -> Observable {
        let m = (0..self.num_outcomes()).fold(CMatrix::zeros(self.n, self.n), |acc, a| {
            acc + self.effect(a) * matrix::c(self.outcomes[a], 0.0)
        });
        Observable::new(m).expect("sum of Hermitian effects")
    }
}

pub fn probabilities(m: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<Vec<f64>> {
    ensure_dim(m.n, rho.dim())?;
    Ok((0..m.num_outcomes())
        .map(|a| matrix::trace(&m.branch(a, rho.matrix())).re)
        .collect())
}

pub fn selective_update(
    m: &GeneralizedMeasurement,
    rho: &DensityMatrix,
    alpha: usize,
) -> Result<MeasurementRecord> {
    ensure_dim(m.n, rho.dim())?;
    if alpha >= m.num_outcomes() {
        return Err(Error::Invalid(format!(
            "outcome index {alpha} out of range ({} outcomes)",
            m.num_outcomes()
        )));
    }
    let branch = m.branch(alpha, rho.matrix());
    let p = matrix::trace(&branch).re;
    if !(p > tol::PROBABILITY) {
        return Err(Error::ImprobableOutcome {
            index: alpha,
            probability: p,
        });
    }
    Ok(MeasurementRecord {
        index: alpha,
        value: m.outcomes[alpha],
        probability: p,
        post_state: DensityMatrix::normalized(branch)?,
    })
}

/// `Ω_O` with the operators flattened in `(α, β)` order.
pub fn nonselective_map(m: &GeneralizedMeasurement) -> KrausMap {
    KrausMap::new(m.operators.iter().flatten().cloned().collect())
        .expect("completeness checked at construction")
}

/// One outcome per distinct eigenvalue (grouped within the degeneracy
/// tolerance), valued at the group's mean eigenvalue, with the spectral
/// projector as its single operator. Outcomes are ordered by decreasing value.
pub fn projective_from_observable(a: &Observable) -> GeneralizedMeasurement {
    let spec = spectral_decompose(a);
    let mut outcomes = Vec::with_capacity(spec.groups.len());
    let mut projectors = Vec::with_capacity(spec.groups.len());
    for g in &spec.groups {
        let vals = &spec.eigenvalues[g.clone()];
        outcomes.push(vals.iter().sum::<f64>() / vals.len() as f64);
        projectors.push(spec.projector(g.clone()));
    }
    GeneralizedMeasurement::projective(outcomes, projectors)
        .expect("spectral projectors resolve the identity")
}

/// Clamps negatives to zero and renormalizes.
fn sampling_weights(p: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    clamped.iter().map(|x| x / total).collect()
}

/// Draws `α` by inverse CDF and returns the selective update for it.
pub fn sample_outcome<R: Rng + ?Sized>(
    m: &GeneralizedMeasurement,
    rho: &DensityMatrix,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let weights = sampling_weights(&probabilities(m, rho)?);
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (a, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        cumulative += w;
        chosen = Some(a);
        if u < cumulative {
            break;
        }
    }
    let alpha = chosen.expect("probabilities sum to one");
    selective_update(m, rho, alpha)
}

/// Random measurement with `outcomes × per_outcome` operators cut from one
/// Haar-random Stiefel point.
pub fn random_measurement<R: Rng + ?Sized>(
    n: usize,
    outcomes: usize,
    per_outcome: usize,
    rng: &mut R,
) -> GeneralizedMeasurement {
    let s = random_isometry(n * outcomes * per_outcome, n, rng);
    let operators = (0..outcomes)
        .map(|a| {
            (0..per_outcome)
                .map(|b| s.rows((a * per_outcome + b) * n, n).into_owned())
                .collect()
        })
        .collect();
    let values = (0..outcomes).map(|a| a as f64).collect();
    GeneralizedMeasurement::new(values, operators).expect("isometry blocks are complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraus::{apply, validate};
    use crate::matrix::{c, diag, identity, pauli_z};
    use crate::random::{random_density, random_hermitian};
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    fn sigma_z() -> GeneralizedMeasurement {
        projective_from_observable(&Observable::new(pauli_z()).unwrap())
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn projective_sigma_z_probabilities() {
        let m = sigma_z();
        let p = probabilities(&m, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
        let p = probabilities(&m, &DensityMatrix::basis_state(2, 0)).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn selective_projection() {
        let m = sigma_z();
        let r = selective_update(&m, &plus(), 0).unwrap();
        assert!((r.probability - 0.5).abs() < 1e-15);
        assert_eq!(r.value, 1.0);
        assert!((r.post_state.matrix() - diag(&[1.0, 0.0])).norm() < 1e-15);

        let r = selective_update(&m, &DensityMatrix::basis_state(2, 0), 0).unwrap();
        assert_eq!(r.probability, 1.0);
        assert_eq!(r.post_state, DensityMatrix::basis_state(2, 0));

        assert!(matches!(
            selective_update(&m, &DensityMatrix::basis_state(2, 0), 1),
            Err(Error::ImprobableOutcome { index: 1, .. })
        ));
    }

    #[test]
    fn nonselective_dephases() {
        let omega = nonselective_map(&sigma_z());
        let out = apply(&omega, &plus()).unwrap();
        assert!((out.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);
        let d = DensityMatrix::new(diag(&[0.3, 0.7])).unwrap();
        assert_eq!(apply(&omega, &d).unwrap(), d);
    }

    #[test]
    fn projective_from_observable_cases() {
        let m = sigma_z();
        assert_eq!(m.outcomes(), &[1.0, -1.0]);
        assert_eq!(m.operators(0)[0], diag(&[1.0, 0.0]));
        assert_eq!(m.operators(1)[0], diag(&[0.0, 1.0]));

        let m = projective_from_observable(&Observable::new(identity(2)).unwrap());
        assert_eq!(m.outcomes(), &[1.0]);
        assert!((&m.operators(0)[0] - identity(2)).norm() < 1e-15);
    }

    #[test]
    fn projectors_of_random_observable() {
        let mut rng = SeededRng::new(8, 0);
        let a = random_hermitian(3, &mut rng);
        let m = projective_from_observable(&a);
        assert_eq!(m.num_outcomes(), 3);
        let projs: Vec<&CMatrix> = (0..3).map(|k| &m.operators(k)[0]).collect();
        let sum = projs.iter().fold(CMatrix::zeros(3, 3), |acc, p| acc + *p);
        assert!((sum - identity(3)).norm() <= 1e-10);
        for (i, p) in projs.iter().enumerate() {
            assert!((matrix::trace(p).re - 1.0).abs() < 1e-10);
            for (j, q) in projs.iter().enumerate() {
                let pq = *p * *q;
                let expected = if i == j {
                    (*p).clone()
                } else {
                    CMatrix::zeros(3, 3)
                };
                assert!((pq - expected).norm() <= 1e-10);
            }
        }
        assert!((m.mean_observable().matrix() - a.matrix()).norm() < 1e-10);
    }

    #[test]
    fn sampling_certain_outcome() {
        let m = sigma_z();
        let mut rng = SeededRng::new(0, 0);
        for _ in 0..100 {
            let r = sample_outcome(&m, &DensityMatrix::basis_state(2, 0), &mut rng).unwrap();
            assert_eq!(r.index, 0);
        }
    }

    #[test]
    fn sampling_frequency_binomial() {
        // 6σ for p = 1/2 at 1e5 draws is 0.0095
        let m = sigma_z();
        let rho = DensityMatrix::maximally_mixed(2);
        let mut rng = SeededRng::new(12, 0);
        let draws = 100_000;
        let zeros = (0..draws)
            .filter(|_| sample_outcome(&m, &rho, &mut rng).unwrap().index == 0)
            .count();
        assert!((zeros as f64 / draws as f64 - 0.5).abs() <= 0.01);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = random_measurement(3, 4, 2, &mut SeededRng::new(1, 0));
        let rho = random_density(3, &mut SeededRng::new(2, 0));
        let seq = |seed| {
            let mut rng = SeededRng::new(seed, 0);
            (0..50)
                .map(|_| sample_outcome(&m, &rho, &mut rng).unwrap().index)
                .collect::<Vec<_>>()
        };
        assert_eq!(seq(3), seq(3));
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let m = random_measurement(2, 2, 2, &mut SeededRng::new(4, 0));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"1,1\""));
        let back: GeneralizedMeasurement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);

        let incomplete =
            r#"{"outcomes":[1],"operators":{"0,0":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}}"#;
        assert!(serde_json::from_str::<GeneralizedMeasurement>(incomplete).is_err());
        let gap = r#"{"outcomes":[1],"operators":{"0,1":[[[1,0],[0,0]],[[0,0],[1,0]]]}}"#;
        assert!(serde_json::from_str::<GeneralizedMeasurement>(gap).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn law_of_total_state(seed in any::<u64>(), n in 1usize..5, outcomes in 1usize..4, per in 1usize..3) {
            let mut rng = SeededRng::new(seed, 0);
            let m = random_measurement(n, outcomes, per, &mut rng);
            let rho = random_density(n, &mut rng);
            let p = probabilities(&m, &rho).unwrap();
            prop_assert!(p.iter().all(|&x| x >= -1e-10));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            let mut mix = CMatrix::zeros(n, n);
            for (a, &pa) in p.iter().enumerate() {
                if pa > tol::PROBABILITY {
                    let r = selective_update(&m, &rho, a).unwrap();
                    mix += r.post_state.matrix() * c(pa, 0.0);
                }
            }
            let omega = nonselective_map(&m);
            prop_assert!(validate(&omega).passed());
            let direct = apply(&omega, &rho).unwrap();
            prop_assert!((direct.matrix() - mix).norm() <= 1e-10);
        }
    }
}
