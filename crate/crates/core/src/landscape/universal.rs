//! Constant-output maps.
//!
//! For a target state `σ = Σ_α p_α |u_α⟩⟨u_α|` and any orthonormal basis
//! `{v_β}`, the operators `√p_α |u_α⟩⟨v_β|` define a Kraus map sending every
//! input to `σ`. Preparing the top eigenvector of `Â` maximizes
//! `Tr[Â Φ(ρ0)]` simultaneously for all initial states.

use crate::kraus::KrausMap;
use crate::matrix::{basis, c, outer};
use crate::spectral::spectral_decompose;
use crate::spectral::spectral_decompose_matrix;
use crate::state::{DensityMatrix, Observable};
use crate::tol;

/// Map with operators `√p_α |u_α⟩⟨e_β|` over the computational basis,
/// skipping target eigenvalues at or below the Choi cutoff.
pub fn preparation_map(target: &DensityMatrix) -> KrausMap {
    let n = target.dim();
    let spec = spectral_decompose_matrix(target.matrix()).expect("density matrices are Hermitian");
    let mut ops = Vec::new();
    for (alpha, &p) in spec.eigenvalues.iter().enumerate() {
        if p <= tol::CHOI_CUTOFF {
            continue;
        }
        let u = spec.vector(alpha);
        for beta in 0..n {
            ops.push(outer(&u, &basis(n, beta)) * c(p.sqrt(), 0.0));
        }
    }
    KrausMap::new(ops).expect("preparation operators are complete")
}

/// Prepares the `k`-th eigenvector of `a` (eigenvalues in descending order,
/// canonical basis inside degenerate eigenspaces): operators `|u_k⟩⟨e_β|`.
pub fn eigenstate_preparation(a: &Observable, k: usize) -> KrausMap {
    let n = a.dim();
    let u = spectral_decompose(a).vector(k);
    let ops = (0..n).map(|beta| outer(&u, &basis(n, beta))).collect();
    KrausMap::new(ops).expect("rank-one preparation is complete")
}

/// The universally optimal map for `a`: prepares its top eigenvector.
pub fn universal_map(a: &Observable) -> KrausMap {
    eigenstate_preparation(a, 0)
}
