use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::kraus::{KrausMap, StiefelPoint};
use crate::matrix::{c, ensure_dim, trace, CMatrix};
use crate::random::{random_density, random_hermitian};
use crate::state::{DensityMatrix, Observable};

/// Target observable and initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Objective {
    pub observable: Observable,
    pub rho0: DensityMatrix,
}

impl Objective {
    pub fn new(observable: Observable, rho0: DensityMatrix) -> Result<Self> {
        ensure_dim(observable.dim(), rho0.dim())?;
        Ok(Self { observable, rho0 })
    }

    /// Random Hermitian target and random initial state.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let observable = random_hermitian(n, rng);
        let rho0 = random_density(n, rng);
        Self { observable, rho0 }
    }

    pub fn dim(&self) -> usize {
        self.observable.dim()
    }

    /// Largest attainable value, `λ_max(Â)`.
    pub fn optimum(&self) -> f64 {
        self.observable.max_eigenvalue()
    }
}

fn value_of_blocks(obj: &Objective, blocks: impl Iterator<Item = CMatrix>) -> f64 {
    let a = obj.observable.matrix();
    let rho = obj.rho0.matrix();
    blocks
        .map(|k| trace(&(a * &k * rho * k.adjoint())).re)
        .sum()
}

pub fn objective_value(obj: &Objective, phi: &KrausMap) -> Result<f64> {
    ensure_dim(obj.dim(), phi.dim())?;
    Ok(value_of_blocks(obj, phi.operators().iter().cloned()))
}

pub fn objective_at(obj: &Objective, s: &StiefelPoint) -> f64 {
    debug_assert_eq!(obj.dim(), s.dim());
    value_of_blocks(obj, s.blocks())
}

/// `nL×n` matrix with block `ν` equal to `2 Â K_ν ρ0`.
pub fn euclidean_gradient(obj: &Objective, s: &StiefelPoint) -> CMatrix {
    let n = s.dim();
    let a2 = obj.observable.matrix() * c(2.0, 0.0);
    let rho = obj.rho0.matrix();
    let mut g = CMatrix::zeros(n * s.rank(), n);
    for nu in 0..s.rank() {
        let k = s.matrix().rows(nu * n, n);
        g.rows_mut(nu * n, n).copy_from(&(&a2 * k * rho));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraus::{apply, random_kraus, random_stiefel, to_stiefel};
    use crate::landscape::geometry::{random_tangent, retract};
    use crate::matrix::{diag, frobenius_inner, pauli_z};
    use crate::rng::SeededRng;
    use crate::state::expectation;

    fn sz() -> Observable {
        Observable::new(pauli_z()).unwrap()
    }

    #[test]
    fn trivial_values() {
        let obj = Objective::new(sz(), DensityMatrix::basis_state(2, 0)).unwrap();
        assert_eq!(objective_value(&obj, &KrausMap::identity(2)).unwrap(), 1.0);
        let rho0 = random_density(2, &mut SeededRng::new(0, 0));
        let obj = Objective::new(sz(), rho0).unwrap();
        let j = objective_value(&obj, &KrausMap::completely_depolarizing(2)).unwrap();
        assert!(j.abs() < 1e-15);
    }

    #[test]
    fn two_routes_agree() {
        let mut rng = SeededRng::new(1, 0);
        for n in 1..=4 {
            let obj = Objective::random(n, &mut rng);
            let phi = random_kraus(n, n * n, &mut rng);
            let via_state = expectation(&obj.observable, &apply(&phi, &obj.rho0).unwrap()).unwrap();
            assert!((objective_value(&obj, &phi).unwrap() - via_state).abs() < 1e-13);
        }
    }

    #[test]
    fn annihilating_alignment_has_zero_gradient() {
        let obj = Objective::new(
            Observable::diagonal(&[1.0, 0.0]),
            DensityMatrix::basis_state(2, 1),
        )
        .unwrap();
        let s = to_stiefel(&KrausMap::identity(2)).unwrap();
        assert_eq!(euclidean_gradient(&obj, &s), CMatrix::zeros(2, 2));
    }

    #[test]
    fn gradient_is_linear_in_observable() {
        let mut rng = SeededRng::new(2, 0);
        let obj = Objective::random(3, &mut rng);
        let doubled = Objective::new(obj.observable.scaled(2.0), obj.rho0.clone()).unwrap();
        let s = random_stiefel(3, 9, &mut rng);
        assert_eq!(
            euclidean_gradient(&doubled, &s),
            euclidean_gradient(&obj, &s) * c(2.0, 0.0)
        );
    }

    #[test]
    fn gradient_matches_central_differences_along_retraction() {
        let mut rng = SeededRng::new(3, 0);
        for n in [2, 3] {
            let obj = Objective::random(n, &mut rng);
            let s = random_stiefel(n, n * n, &mut rng);
            let g = euclidean_gradient(&obj, &s);
            for _ in 0..10 {
                let d = random_tangent(&s, &mut rng);
                let t = 1e-5;
                let plus = objective_at(&obj, &retract(&s, &(&d * c(t, 0.0))).unwrap());
                let minus = objective_at(&obj, &retract(&s, &(&d * c(-t, 0.0))).unwrap());
                let fd = (plus - minus) / (2.0 * t);
                let exact = frobenius_inner(&d, &g).re;
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3),
                    "{fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn value_within_spectrum() {
        let mut rng = SeededRng::new(4, 0);
        let obj = Objective::new(
            Observable::new(diag(&[3.0, -1.0, 0.5])).unwrap(),
            random_density(3, &mut rng),
        )
        .unwrap();
        for _ in 0..50 {
            let j = objective_value(&obj, &random_kraus(3, 4, &mut rng)).unwrap();
            assert!((-1.0 - 1e-10..=3.0 + 1e-10).contains(&j));
        }
    }
}
