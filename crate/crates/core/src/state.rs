//! Density matrices, observables and the tensor / partial-trace algebra.
//!
//! Composite systems always put the plant first: index `(p, c)` of a
//! `n_plant ⊗ n_ctrl` space is `p * n_ctrl + c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    self, basis, ensure_dim, ensure_square, hermitian_part, hermitian_residual, outer, trace,
    CMatrix, C64, ZERO,
};
use crate::spectral::hermitian_eigenvalues;
use crate::tol;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "matrix::JsonMatrix", into = "matrix::JsonMatrix")]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity. The stored matrix is the
    /// Hermitian part of the input.
    pub fn new(mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let residual = hermitian_residual(&mat);
        if residual > tol::HERMITIAN {
            return Err(Error::InvalidState(format!(
                "Hermiticity residual {residual:.3e}"
            )));
        }
        let mat = hermitian_part(&mat);
        let tr = trace(&mat).re;
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&mat).last().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::InvalidState(format!("eigenvalue {min:.3e}")));
        }
        Ok(Self { mat })
    }

    /// Hermitizes and divides by the trace before validating. Used for outputs
    /// of maps whose trace is one only up to rounding.
    pub fn normalized(mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let h = hermitian_part(&mat);
        let tr = trace(&h).re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        Self::new(h / C64::new(tr, 0.0))
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(outer(&v, &v))
    }

    pub fn basis_state(n: usize, k: usize) -> Self {
        Self {
            mat: outer(&basis(n, k), &basis(n, k)),
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            mat: matrix::identity(n) / C64::new(n as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        matrix::frobenius_inner(&self.mat, &self.mat).re
    }
}

impl TryFrom<matrix::JsonMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: matrix::JsonMatrix) -> Result<Self> {
        Self::new(m.0)
    }
}

impl From<DensityMatrix> for matrix::JsonMatrix {
    fn from(d: DensityMatrix) -> Self {
        matrix::JsonMatrix(d.mat)
    }
}

/// Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "matrix::JsonMatrix", into = "matrix::JsonMatrix")]
pub struct Observable {
    mat: CMatrix,
}

impl Observable {
    pub fn new(mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let residual = hermitian_residual(&mat);
        if residual > tol::HERMITIAN {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self {
            mat: hermitian_part(&mat),
        })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            mat: matrix::diag(values),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mat: &self.mat * C64::new(factor, 0.0),
        }
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().unwrap()
    }
}

impl TryFrom<matrix::JsonMatrix> for Observable {
    type Error = Error;
    fn try_from(m: matrix::JsonMatrix) -> Result<Self> {
        Self::new(m.0)
    }
}

impl From<Observable> for matrix::JsonMatrix {
    fn from(o: Observable) -> Self {
        matrix::JsonMatrix(o.mat)
    }
}

/// `Tr(Âρ)` as a complex number; the imaginary part is rounding residue.
pub fn expectation_complex(a: &Observable, rho: &DensityMatrix) -> Result<C64> {
    ensure_dim(a.dim(), rho.dim())?;
    Ok(trace(&(a.matrix() * rho.matrix())))
}

/// `Re Tr(Âρ)`.
pub fn expectation(a: &Observable, rho: &DensityMatrix) -> Result<f64> {
    let z = expectation_complex(a, rho)?;
    debug_assert!(z.im.abs() <= tol::HERMITIAN * (1.0 + a.matrix().norm()));
    Ok(z.re)
}

/// Kronecker product, block `(i, j)` equal to `A_ij · B`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    Plant,
    Controller,
}

/// Partial trace of a raw `(n_plant·n_ctrl)`-square matrix.
pub fn partial_trace_matrix(
    m: &CMatrix,
    (n_plant, n_ctrl): (usize, usize),
    keep: Subsystem,
) -> Result<CMatrix> {
    let n = ensure_square(m)?;
    if n_plant == 0 || n_ctrl == 0 || n_plant * n_ctrl != n {
        return Err(Error::Invalid(format!(
            "dimensions {n_plant}×{n_ctrl} do not factor {n}"
        )));
    }
    Ok(match keep {
        Subsystem::Plant => CMatrix::from_fn(n_plant, n_plant, |i, j| {
            (0..n_ctrl).fold(ZERO, |acc, k| acc + m[(i * n_ctrl + k, j * n_ctrl + k)])
        }),
        Subsystem::Controller => CMatrix::from_fn(n_ctrl, n_ctrl, |i, j| {
            (0..n_plant).fold(ZERO, |acc, k| acc + m[(k * n_ctrl + i, k * n_ctrl + j)])
        }),
    })
}

pub fn partial_trace(
    rho_tot: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    DensityMatrix::normalized(partial_trace_matrix(rho_tot.matrix(), dims, keep)?)
}

/// `½ Σ |eig(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_dim(rho.dim(), sigma.dim())?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5
        * hermitian_eigenvalues(&diff)
            .iter()
            .map(|x| x.abs())
            .sum::<f64>())
}
