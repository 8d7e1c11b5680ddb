//! Sampled feedback runs.
//!
//! Trial `k` of a Monte Carlo estimate always draws from `rng.fork(k)`, so
//! an estimate is independent of the number of threads and its first `M`
//! trials coincide with those of any larger estimate from the same generator.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feedback::process::FeedbackProcess;
use crate::kraus::apply;
use crate::matrix::{ensure_dim, CMatrix, C64};
use crate::measurement::sample_outcome;
use crate::par::{map_indexed, Execution};
use crate::rng::SeededRng;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    /// Observed outcome index per iteration.
    pub outcomes: Vec<usize>,
    /// Initial state followed by the state after each iteration.
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

pub fn simulate_trajectory<R: Rng + ?Sized>(
    process: &FeedbackProcess,
    rho0: &DensityMatrix,
    rng: &mut R,
) -> Result<Trajectory> {
    ensure_dim(process.dim(), rho0.dim())?;
    let mut outcomes = Vec::with_capacity(process.len());
    let mut states = Vec::with_capacity(process.len() + 1);
    states.push(rho0.clone());
    for it in process.iterations() {
        let record = sample_outcome(it.measurement(), states.last().unwrap(), rng)?;
        let next = apply(it.action(record.index), &record.post_state)?;
        outcomes.push(record.index);
        states.push(next);
    }
    Ok(Trajectory { outcomes, states })
}

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub trials: usize,
    pub mean: DensityMatrix,
    /// Standard error of each entry's mean (modulus of the complex spread);
    /// absent for a single trial.
    pub stderr: Option<DMatrix<f64>>,
}

impl MonteCarloEstimate {
    pub fn max_stderr(&self) -> Option<f64> {
        self.stderr.as_ref().map(|s| s.max())
    }
}

pub fn monte_carlo_average(
    process: &FeedbackProcess,
    rho0: &DensityMatrix,
    trials: usize,
    rng: &SeededRng,
) -> Result<MonteCarloEstimate> {
    monte_carlo_average_with(process, rho0, trials, rng, Execution::default())
}

pub fn monte_carlo_average_with(
    process: &FeedbackProcess,
    rho0: &DensityMatrix,
    trials: usize,
    rng: &SeededRng,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is required".into()));
    }
    ensure_dim(process.dim(), rho0.dim())?;
    let finals: Vec<CMatrix> = map_indexed(trials, exec, |k| {
        simulate_trajectory(process, rho0, &mut rng.fork(k as u64))
            .map(|t| t.final_state().matrix().clone())
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let n = rho0.dim();
    let m = trials as f64;
    let mean = finals.iter().fold(CMatrix::zeros(n, n), |acc, x| acc + x) / C64::new(m, 0.0);
    let stderr = (trials > 1).then(|| {
        DMatrix::from_fn(n, n, |i, j| {
            let ss: f64 = finals
                .iter()
                .map(|x| (x[(i, j)] - mean[(i, j)]).norm_sqr())
                .sum();
            (ss / (m - 1.0) / m).sqrt()
        })
    });
    Ok(MonteCarloEstimate {
        trials,
        mean: DensityMatrix::normalized(mean)?,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::process::tests::reset_iteration;
    use crate::feedback::process::{process_map, random_process, FeedbackIteration};
    use crate::kraus::KrausMap;
    use crate::matrix::pauli_x;
    use crate::measurement::GeneralizedMeasurement;
    use crate::random::random_density;
    use crate::state::trace_distance;

    #[test]
    fn reset_trajectories_end_in_ground_state() {
        let process = FeedbackProcess::new(vec![reset_iteration()]).unwrap();
        let mut rng = SeededRng::new(0, 0);
        for _ in 0..50 {
            let rho0 = random_density(2, &mut rng);
            let t = simulate_trajectory(&process, &rho0, &mut rng).unwrap();
            assert_eq!(t.states.len(), 2);
            assert!(
                (t.final_state().matrix() - DensityMatrix::basis_state(2, 0).matrix()).norm()
                    < 1e-12
            );
        }
    }

    #[test]
    fn deterministic_process_matches_map() {
        // trivial measurement: every probability is 0 or 1
        let it = FeedbackIteration::new(
            GeneralizedMeasurement::trivial(2),
            vec![KrausMap::unitary(pauli_x()).unwrap()],
        )
        .unwrap();
        let process = FeedbackProcess::new(vec![it.clone(), it.clone(), it]).unwrap();
        let rho0 = random_density(2, &mut SeededRng::new(1, 0));
        let exact = apply(&process_map(&process).unwrap(), &rho0).unwrap();
        let t = simulate_trajectory(&process, &rho0, &mut SeededRng::new(2, 0)).unwrap();
        assert!(trace_distance(t.final_state(), &exact).unwrap() < 1e-12);
        for m in [1, 3, 17] {
            let est = monte_carlo_average(&process, &rho0, m, &SeededRng::new(2, 0)).unwrap();
            assert!(trace_distance(&est.mean, &exact).unwrap() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_outcomes() {
        let mut rng = SeededRng::new(3, 0);
        let process = random_process(2, 5, 2, 1, 2, &mut rng);
        let rho0 = random_density(2, &mut rng);
        let a = simulate_trajectory(&process, &rho0, &mut SeededRng::new(9, 0)).unwrap();
        let b = simulate_trajectory(&process, &rho0, &mut SeededRng::new(9, 0)).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
    }

    #[test]
    fn estimates_are_prefix_consistent_and_mode_independent() {
        let mut rng = SeededRng::new(4, 0);
        let process = random_process(2, 3, 2, 2, 2, &mut rng);
        let rho0 = random_density(2, &mut rng);
        let base = SeededRng::new(5, 0);
        let one = monte_carlo_average(&process, &rho0, 1, &base).unwrap();
        let first = simulate_trajectory(&process, &rho0, &mut base.fork(0)).unwrap();
        assert_eq!(one.mean.matrix(), first.final_state().matrix());
        assert!(one.stderr.is_none());

        let seq =
            monte_carlo_average_with(&process, &rho0, 200, &base, Execution::Sequential).unwrap();
        let par =
            monte_carlo_average_with(&process, &rho0, 200, &base, Execution::Parallel).unwrap();
        assert_eq!(seq.mean, par.mean);
        assert!(seq.max_stderr().unwrap() > 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let process = FeedbackProcess::new(vec![reset_iteration()]).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(2);
        assert!(monte_carlo_average(&process, &rho0, 0, &SeededRng::new(0, 0)).is_err());
    }
}
