//! Shared config pieces: loading, observable and state specs.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use kraus_landscape::matrix::{identity, pauli_x, pauli_y, pauli_z, JsonMatrix};
use kraus_landscape::random::{random_density, random_hermitian};
use kraus_landscape::{DensityMatrix, Observable, SeededRng};

/// Reads a config file, or falls back to `T::default()` without one.
/// Unknown keys are rejected by each config type.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> anyhow::Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diag {
    pub diag: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Explicit {
    pub matrix: JsonMatrix,
}

/// `"sigma_x" | "sigma_y" | "sigma_z" | "identity" | "random"`,
/// `{"diag": [...]}` or `{"matrix": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Preset(String),
    Diag(Diag),
    Matrix(Explicit),
}

impl ObservableSpec {
    /// Dimension implied by the spec itself, if any.
    pub fn fixed_dim(&self) -> anyhow::Result<Option<usize>> {
        Ok(match self {
            Self::Preset(p) => match p.as_str() {
                "sigma_x" | "sigma_y" | "sigma_z" => Some(2),
                "identity" | "random" => None,
                other => bail!("unknown observable preset {other:?}"),
            },
            Self::Diag(d) => Some(d.diag.len()),
            Self::Matrix(m) => Some(m.matrix.0.nrows()),
        })
    }

    pub fn resolve(&self, dim: Option<usize>, rng: &mut SeededRng) -> anyhow::Result<Observable> {
        let fixed = self.fixed_dim()?;
        if let (Some(f), Some(d)) = (fixed, dim) {
            ensure!(f == d, "observable has dimension {f}, expected {d}");
        }
        let n = fixed
            .or(dim)
            .context("observable preset needs a dimension")?;
        ensure!(n >= 1, "observable dimension must be positive");
        let a = match self {
            Self::Preset(p) => match p.as_str() {
                "sigma_x" => Observable::new(pauli_x())?,
                "sigma_y" => Observable::new(pauli_y())?,
                "sigma_z" => Observable::new(pauli_z())?,
                "identity" => Observable::new(identity(n))?,
                _ => random_hermitian(n, rng),
            },
            Self::Diag(d) => Observable::diagonal(&d.diag),
            Self::Matrix(m) => Observable::new(m.matrix.0.clone())?,
        };
        Ok(a)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Basis {
    pub basis: usize,
}

/// `"random" | "maximally_mixed"`, `{"basis": k}` or `{"matrix": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Basis(Basis),
    Matrix(Explicit),
}

impl Default for StateSpec {
    fn default() -> Self {
        Self::Preset("random".into())
    }
}

impl StateSpec {
    pub fn resolve(&self, n: usize, rng: &mut SeededRng) -> anyhow::Result<DensityMatrix> {
        Ok(match self {
            Self::Preset(p) => match p.as_str() {
                "random" => random_density(n, rng),
                "maximally_mixed" => DensityMatrix::maximally_mixed(n),
                other => bail!("unknown state preset {other:?}"),
            },
            Self::Basis(b) => {
                ensure!(
                    b.basis < n,
                    "basis index {} out of range for dimension {n}",
                    b.basis
                );
                DensityMatrix::basis_state(n, b.basis)
            }
            Self::Matrix(m) => {
                let rho = DensityMatrix::new(m.matrix.0.clone())?;
                ensure!(
                    rho.dim() == n,
                    "state has dimension {}, expected {n}",
                    rho.dim()
                );
                rho
            }
        })
    }

    /// Checks preset names without needing a dimension.
    pub fn check(&self) -> anyhow::Result<()> {
        if let Self::Preset(p) = self {
            ensure!(
                matches!(p.as_str(), "random" | "maximally_mixed"),
                "unknown state preset {p:?}"
            );
        }
        Ok(())
    }
}
