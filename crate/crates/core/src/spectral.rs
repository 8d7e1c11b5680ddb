//! Hermitian eigendecomposition with a deterministic basis.
//!
//! Eigenvalues are sorted in descending order and grouped when consecutive
//! values differ by at most [`tol::DEGENERATE`]. Inside each group the
//! eigenvectors are replaced by a canonical basis of the eigenspace: the
//! Gram-Schmidt orthonormalization of the projected computational basis
//! vectors `P e_0, P e_1, …`, keeping the first ones with substantial weight.
//! The basis therefore depends on the eigenspace only, not on the solver.

use std::ops::Range;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_part, hermitian_residual, CMatrix, C64, ZERO};
use crate::state::Observable;
use crate::tol;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns, column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
    /// Index ranges of (near-)degenerate eigenvalue groups, in order.
    pub groups: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// Orthogonal projector onto the span of eigenvectors in `range`.
    pub fn projector(&self, range: Range<usize>) -> CMatrix {
        let v = self.eigenvectors.columns(range.start, range.len());
        v * v.adjoint()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let lam = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&x| C64::new(x, 0.0)),
        ));
        v * lam * v.adjoint()
    }
}

pub fn spectral_decompose(a: &Observable) -> SpectralDecomposition {
    decompose_hermitian(a.matrix())
}

/// Like [`spectral_decompose`] for a raw matrix, checking Hermiticity first.
pub fn spectral_decompose_matrix(a: &CMatrix) -> Result<SpectralDecomposition> {
    crate::matrix::ensure_square(a)?;
    let residual = hermitian_residual(a);
    if residual > tol::HERMITIAN {
        return Err(Error::NotHermitian { residual });
    }
    Ok(decompose_hermitian(&hermitian_part(a)))
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Plain eigendecomposition, eigenvalues descending, no degeneracy handling.
/// Use this where only `V·diag(λ)·V†` matters, not the choice of basis.
pub(crate) fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn decompose_hermitian(a: &CMatrix) -> SpectralDecomposition {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || eigenvalues[k - 1] - eigenvalues[k] > tol::DEGENERATE {
            groups.push(start..k);
            start = k;
        }
    }

    let mut eigenvectors = CMatrix::zeros(n, n);
    for g in &groups {
        let cols: Vec<usize> = g.clone().map(|k| order[k]).collect();
        let raw = CMatrix::from_fn(n, cols.len(), |r, c| eig.eigenvectors[(r, cols[c])]);
        let canon = canonical_basis(&raw);
        for (c, k) in g.clone().enumerate() {
            eigenvectors.set_column(k, &canon.column(c));
        }
    }

    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        groups,
    }
}

/// Canonical orthonormal basis of the column span of `v` (orthonormal columns).
fn canonical_basis(v: &CMatrix) -> CMatrix {
    let (n, k) = v.shape();
    let proj = v * v.adjoint();
    let threshold = 1e-3;
    let mut chosen: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(k);
    let mut used = vec![false; n];

    let residual_of = |i: usize, chosen: &[nalgebra::DVector<C64>]| {
        let mut w = proj.column(i).into_owned();
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for q in chosen {
                let overlap = q.dotc(&w);
                w -= q * overlap;
            }
        }
        w
    };

    for (i, taken) in used.iter_mut().enumerate() {
        if chosen.len() == k {
            break;
        }
        let w = residual_of(i, &chosen);
        let norm = w.norm();
        if norm > threshold {
            chosen.push(w / C64::new(norm, 0.0));
            *taken = true;
        }
    }
    // Fallback for pathological subspaces: take the heaviest remaining direction.
    while chosen.len() < k {
        let (best, w) = (0..n)
            .filter(|&i| !used[i])
            .map(|i| (i, residual_of(i, &chosen)))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("subspace dimension exceeds ambient dimension");
        let norm = w.norm();
        chosen.push(w / C64::new(norm, 0.0));
        used[best] = true;
    }

    let mut out = CMatrix::from_element(n, k, ZERO);
    for (c, q) in chosen.iter().enumerate() {
        out.set_column(c, q);
    }
    out
}
