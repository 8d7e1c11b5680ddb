//! Coherent feedback: plant and controller evolve jointly under a unitary
//! `U`, starting from `ρ ⊗ ρ_c`. The reduced plant evolution is the map with
//! operators `K_{ν,j} = √q_j (I ⊗ ⟨ν|) U (I ⊗ |χ_j⟩)`, where
//! `ρ_c = Σ_j q_j |χ_j⟩⟨χ_j|` and `{|ν⟩}` is a controller basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kraus::KrausMap;
use crate::matrix::{self, ensure_dim, ensure_square, CMatrix, C64, ZERO};
use crate::spectral::spectral_decompose_matrix;
use crate::state::{partial_trace_matrix, tensor_product, DensityMatrix, Subsystem};
use crate::tol;

/// Controller eigen-weights below this are dropped.
const WEIGHT_CUTOFF: f64 = 1e-12;

/// The joint initial state is assumed to be a product `ρ ⊗ ρ_c`; that
/// precondition cannot be checked from the setup alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentFeedbackSetup {
    n_plant: usize,
    n_ctrl: usize,
    #[serde(with = "matrix::serde_matrix")]
    u: CMatrix,
    rho_ctrl0: DensityMatrix,
}

impl CoherentFeedbackSetup {
    pub fn new(
        n_plant: usize,
        n_ctrl: usize,
        u: CMatrix,
        rho_ctrl0: DensityMatrix,
    ) -> Result<Self> {
        let d = ensure_square(&u)?;
        ensure_dim(n_plant * n_ctrl, d)?;
        ensure_dim(n_ctrl, rho_ctrl0.dim())?;
        let residual = (u.adjoint() * &u - matrix::identity(d)).norm();
        if residual > tol::UNITARY {
            return Err(Error::NotIsometry { residual });
        }
        Ok(Self {
            n_plant,
            n_ctrl,
            u,
            rho_ctrl0,
        })
    }

    pub fn n_plant(&self) -> usize {
        self.n_plant
    }

    pub fn n_ctrl(&self) -> usize {
        self.n_ctrl
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.u
    }

    pub fn controller_state(&self) -> &DensityMatrix {
        &self.rho_ctrl0
    }
}

/// SWAP on `n ⊗ n`.
pub fn swap(n: usize) -> CMatrix {
    CMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, b) = (r / n, r % n);
        if c == b * n + a {
            matrix::ONE
        } else {
            ZERO
        }
    })
}

/// Induced map using the computational basis of the controller.
pub fn coherent_induced_map(setup: &CoherentFeedbackSetup) -> Result<KrausMap> {
    coherent_induced_map_in_basis(setup, &matrix::identity(setup.n_ctrl))
}

/// Induced map using the controller basis given by the columns of `basis`
/// (a unitary). Every basis yields the same superoperator.
pub fn coherent_induced_map_in_basis(
    setup: &CoherentFeedbackSetup,
    basis: &CMatrix,
) -> Result<KrausMap> {
    let (np, nc) = (setup.n_plant, setup.n_ctrl);
    ensure_dim(nc, ensure_square(basis)?)?;
    let spec = spectral_decompose_matrix(setup.rho_ctrl0.matrix())?;
    let u = &setup.u;
    let mut ops = Vec::new();
    for (j, &q) in spec.eigenvalues.iter().enumerate() {
        if q < WEIGHT_CUTOFF {
            continue;
        }
        let chi = spec.eigenvectors.column(j);
        let scale = C64::new(q.sqrt(), 0.0);
        for nu in 0..nc {
            let bra = basis.column(nu);
            let k = CMatrix::from_fn(np, np, |a, b| {
                let mut acc = ZERO;
                for m in 0..nc {
                    for c in 0..nc {
                        acc += bra[m].conj() * u[(a * nc + m, b * nc + c)] * chi[c];
                    }
                }
                acc * scale
            });
            ops.push(k);
        }
    }
    KrausMap::new(ops)
}

/// `Tr_c[U (ρ ⊗ ρ_c) U†]`, the direct route.
pub fn coherent_reduced_state(
    setup: &CoherentFeedbackSetup,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    ensure_dim(setup.n_plant, rho.dim())?;
    let joint = tensor_product(rho.matrix(), setup.rho_ctrl0.matrix());
    let evolved = &setup.u * joint * setup.u.adjoint();
    let reduced = partial_trace_matrix(&evolved, (setup.n_plant, setup.n_ctrl), Subsystem::Plant)?;
    DensityMatrix::normalized(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraus::{apply, map_distance, validate};
    use crate::random::{random_density, random_pure_state, random_unitary};
    use crate::rng::SeededRng;
    use crate::state::trace_distance;

    #[test]
    fn swap_with_ground_controller_resets_plant() {
        let setup =
            CoherentFeedbackSetup::new(2, 2, swap(2), DensityMatrix::basis_state(2, 0)).unwrap();
        let phi = coherent_induced_map(&setup).unwrap();
        let mut rng = SeededRng::new(0, 0);
        for _ in 0..10 {
            let out = apply(&phi, &random_density(2, &mut rng)).unwrap();
            assert!(trace_distance(&out, &DensityMatrix::basis_state(2, 0)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn decoupled_unitary_recovers_plant_channel() {
        let mut rng = SeededRng::new(1, 0);
        let v = random_unitary(3, &mut rng);
        let u = tensor_product(&v, &matrix::identity(2));
        let setup = CoherentFeedbackSetup::new(3, 2, u, random_density(2, &mut rng)).unwrap();
        let phi = coherent_induced_map(&setup).unwrap();
        let unitary = KrausMap::unitary(v).unwrap();
        assert!(map_distance(&phi, &unitary).unwrap() < 1e-12);
    }

    #[test]
    fn matches_partial_trace_route() {
        let mut rng = SeededRng::new(2, 0);
        for (np, nc) in [(2, 2), (2, 3), (3, 2)] {
            let u = random_unitary(np * nc, &mut rng);
            let setup =
                CoherentFeedbackSetup::new(np, nc, u, random_pure_state(nc, &mut rng)).unwrap();
            let phi = coherent_induced_map(&setup).unwrap();
            assert!(validate(&phi).tp_residual <= 1e-10);
            for _ in 0..20 {
                let rho = random_density(np, &mut rng);
                let a = apply(&phi, &rho).unwrap();
                let b = coherent_reduced_state(&setup, &rho).unwrap();
                assert!(trace_distance(&a, &b).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn mixed_controller_and_basis_independence() {
        let mut rng = SeededRng::new(3, 0);
        let u = random_unitary(6, &mut rng);
        let setup = CoherentFeedbackSetup::new(2, 3, u, random_density(3, &mut rng)).unwrap();
        let phi = coherent_induced_map(&setup).unwrap();
        assert_eq!(phi.rank(), 9);
        let rho = random_density(2, &mut rng);
        let d = trace_distance(
            &apply(&phi, &rho).unwrap(),
            &coherent_reduced_state(&setup, &rho).unwrap(),
        );
        assert!(d.unwrap() <= 1e-10);
        let other = coherent_induced_map_in_basis(&setup, &random_unitary(3, &mut rng)).unwrap();
        assert!(map_distance(&phi, &other).unwrap() <= 1e-10);
    }

    #[test]
    fn non_unitary_rejected() {
        let u = matrix::identity(4) * C64::new(0.9, 0.0);
        assert!(CoherentFeedbackSetup::new(2, 2, u, DensityMatrix::basis_state(2, 0)).is_err());
    }
}
