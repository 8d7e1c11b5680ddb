//! Riemannian gradient ascent with a backtracking line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kraus::StiefelPoint;
use crate::landscape::geometry::{retract, riemannian_gradient};
use crate::landscape::objective::{euclidean_gradient, objective_at, Objective};
use crate::matrix::c;

/// Sufficient-increase constant of the Armijo test.
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AscentConfig {
    /// Operators per map; `None` means `n²`.
    pub operators: Option<usize>,
    pub max_iterations: usize,
    /// Stop once the Riemannian gradient norm falls to this value.
    pub grad_tol: f64,
    pub initial_step: f64,
    /// Factor applied to a rejected step.
    pub backtrack: f64,
    pub min_step: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            operators: None,
            max_iterations: 5000,
            grad_tol: 1e-8,
            initial_step: 0.1,
            backtrack: 0.5,
            min_step: 1e-12,
        }
    }
}

impl AscentConfig {
    pub fn operators_for(&self, n: usize) -> usize {
        self.operators.unwrap_or(n * n)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.grad_tol, self.initial_step, self.min_step];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Invalid(
                "grad_tol, initial_step and min_step must be positive".into(),
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Invalid("backtrack must lie in (0, 1)".into()));
        }
        if self.max_iterations == 0 || self.operators == Some(0) {
            return Err(Error::Invalid(
                "max_iterations and operators must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    StepUnderflow,
}

#[derive(Debug, Clone, Serialize)]
pub struct AscentResult {
    #[serde(skip)]
    pub point: StiefelPoint,
    /// Objective before the first step and after every accepted step.
    pub j_trace: Vec<f64>,
    pub grad_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub termination: Termination,
}

impl AscentResult {
    pub fn final_value(&self) -> f64 {
        *self.j_trace.last().unwrap()
    }
}

/// Steepest ascent along the Riemannian gradient. The line search starts at
/// twice the previously accepted step (never below `initial_step`) and
/// shrinks by `backtrack` until the Armijo condition `J(S') ≥ J(S) + c·t·‖g‖²`
/// holds; only strict improvements are accepted.
///
/// Once `t‖g‖²` drops below the rounding noise of `J` (around 1e-15) no step
/// can be certified, so runs near the optimum often end in
/// [`Termination::StepUnderflow`] with `‖g‖` of order 1e-8..1e-7.
pub fn ascend(obj: &Objective, start: &StiefelPoint, cfg: &AscentConfig) -> AscentResult {
    let mut s = start.clone();
    let mut j = objective_at(obj, &s);
    let mut j_trace = vec![j];
    let mut iterations = 0;
    let mut trial = cfg.initial_step;

    loop {
        let g = riemannian_gradient(&s, &euclidean_gradient(obj, &s));
        let gn = g.norm();
        let done = |termination, s: StiefelPoint, j_trace: Vec<f64>, iterations| AscentResult {
            point: s,
            j_trace,
            grad_norm: gn,
            converged: termination == Termination::GradientTolerance,
            iterations,
            termination,
        };
        if gn <= cfg.grad_tol {
            return done(Termination::GradientTolerance, s, j_trace, iterations);
        }
        if iterations >= cfg.max_iterations {
            return done(Termination::MaxIterations, s, j_trace, iterations);
        }

        let mut t = trial;
        let accepted = loop {
            if t < cfg.min_step {
                break None;
            }
            if let Ok(candidate) = retract(&s, &(&g * c(t, 0.0))) {
                let jc = objective_at(obj, &candidate);
                if jc > j && jc >= j + ARMIJO * t * gn * gn {
                    break Some((candidate, jc));
                }
            }
            t *= cfg.backtrack;
        };
        match accepted {
            Some((candidate, jc)) => {
                s = candidate;
                j = jc;
                j_trace.push(j);
                iterations += 1;
                trial = (2.0 * t).max(cfg.initial_step);
            }
            None => return done(Termination::StepUnderflow, s, j_trace, iterations),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraus::{random_stiefel, to_stiefel};
    use crate::landscape::universal::universal_map;
    use crate::random::random_density;
    use crate::rng::SeededRng;
    use crate::state::Observable;

    #[test]
    fn starting_at_the_optimum_converges_immediately() {
        let mut rng = SeededRng::new(0, 0);
        let obj = Objective::random(3, &mut rng);
        let start = to_stiefel(&universal_map(&obj.observable)).unwrap();
        let r = ascend(&obj, &start, &AscentConfig::default());
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert!((r.final_value() - obj.optimum()).abs() < 1e-12);
    }

    #[test]
    fn qubit_ascent_reaches_top_eigenvalue() {
        let mut rng = SeededRng::new(1, 0);
        let obj = Objective::new(
            Observable::diagonal(&[1.0, -1.0]),
            random_density(2, &mut rng),
        )
        .unwrap();
        let start = random_stiefel(2, 4, &mut rng);
        let r = ascend(&obj, &start, &AscentConfig::default());
        assert!((r.final_value() - 1.0).abs() <= 1e-4);
        assert!(r.j_trace.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn traces_are_monotone() {
        let mut rng = SeededRng::new(2, 0);
        for n in 2..=4 {
            let obj = Objective::random(n, &mut rng);
            let r = ascend(
                &obj,
                &random_stiefel(n, n * n, &mut rng),
                &AscentConfig::default(),
            );
            assert!(r.j_trace.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(r.j_trace.len(), r.iterations + 1);
        }
    }

    #[test]
    fn config_validation() {
        assert!(AscentConfig::default().validate().is_ok());
        let bad = AscentConfig {
            backtrack: 1.5,
            ..AscentConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
