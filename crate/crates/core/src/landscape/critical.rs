//! Curvature probing at critical points.
//!
//! At a critical point the second derivative of `t ↦ J(retract(S, tΔ))` at
//! `t = 0` is the Riemannian Hessian quadratic form along `Δ`. It is
//! estimated by central differences along random unit tangent directions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kraus::StiefelPoint;
use crate::landscape::geometry::{random_tangent, retract, riemannian_gradient};
use crate::landscape::objective::{euclidean_gradient, objective_at, Objective};
use crate::matrix::c;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    /// Largest Riemannian gradient norm accepted as critical.
    pub grad_tol: f64,
    /// `|J − λ_max|` below which the point counts as a global maximum.
    pub optimum_tol: f64,
    /// Curvatures within `±curvature_threshold` count as flat.
    pub curvature_threshold: f64,
    /// Finite-difference step along each probe direction.
    pub step: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            optimum_tol: 1e-8,
            curvature_threshold: 1e-6,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    GlobalMaxCandidate,
    Saddle,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    pub j_value: f64,
    pub optimum: f64,
    pub grad_norm: f64,
    /// `(probe index, second-derivative estimate)`.
    pub curvatures: Vec<(usize, f64)>,
    pub classification: Classification,
}

impl CriticalReport {
    pub fn positive_count(&self, threshold: f64) -> usize {
        self.curvatures
            .iter()
            .filter(|(_, k)| *k > threshold)
            .count()
    }

    pub fn negative_count(&self, threshold: f64) -> usize {
        self.curvatures
            .iter()
            .filter(|(_, k)| *k < -threshold)
            .count()
    }

    pub fn max_curvature(&self) -> Option<f64> {
        self.curvatures.iter().map(|p| p.1).max_by(f64::total_cmp)
    }

    pub fn min_curvature(&self) -> Option<f64> {
        self.curvatures.iter().map(|p| p.1).min_by(f64::total_cmp)
    }
}

/// Global-max candidate if `J` is within `optimum_tol` of `λ_max`; otherwise
/// a saddle iff both strictly positive and strictly negative curvature were
/// found; otherwise undetermined.
pub fn classify_critical<R: Rng + ?Sized>(
    obj: &Objective,
    s: &StiefelPoint,
    probes: usize,
    cfg: &ProbeConfig,
    rng: &mut R,
) -> Result<CriticalReport> {
    let grad_norm = riemannian_gradient(s, &euclidean_gradient(obj, s)).norm();
    if grad_norm > cfg.grad_tol {
        return Err(Error::NotCritical {
            grad_norm,
            tolerance: cfg.grad_tol,
        });
    }
    let j0 = objective_at(obj, s);
    let h = cfg.step;
    let mut curvatures = Vec::with_capacity(probes);
    for k in 0..probes {
        let d = random_tangent(s, rng);
        let plus = objective_at(obj, &retract(s, &(&d * c(h, 0.0)))?);
        let minus = objective_at(obj, &retract(s, &(&d * c(-h, 0.0)))?);
        curvatures.push((k, (plus - 2.0 * j0 + minus) / (h * h)));
    }

    let optimum = obj.optimum();
    let delta = cfg.curvature_threshold;
    let up = curvatures.iter().any(|(_, x)| *x > delta);
    let down = curvatures.iter().any(|(_, x)| *x < -delta);
    let classification = if (j0 - optimum).abs() <= cfg.optimum_tol {
        Classification::GlobalMaxCandidate
    } else if up && down {
        Classification::Saddle
    } else {
        Classification::Undetermined
    };
    Ok(CriticalReport {
        j_value: j0,
        optimum,
        grad_norm,
        curvatures,
        classification,
    })
}
