//! Seeded sampling of matrices, unitaries, states and observables.

use nalgebra::QR;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{hermitian_part, CMatrix, C64};
use crate::state::{DensityMatrix, Observable};

/// Entries `(x + iy)/√2` with `x, y ~ N(0, 1)`.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Haar-random `rows×cols` isometry (`rows ≥ cols`): the Q factor of a
/// complex Gaussian matrix with the phases of `diag(R)` absorbed.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols && cols >= 1, "isometry needs rows ≥ cols ≥ 1");
    let g = gaussian_matrix(rows, cols, rng);
    let qr = QR::new(g);
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..cols {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    random_isometry(n, n, rng)
}

/// `GG†/Tr(GG†)` for complex Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(n, n, rng);
    DensityMatrix::normalized(&g * g.adjoint()).expect("Wishart sample is a valid state")
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(n, 1, rng);
    let psi: Vec<C64> = g.iter().copied().collect();
    DensityMatrix::pure(&psi).expect("nonzero Gaussian vector")
}

/// `(G + G†)/2` for complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Observable {
    Observable::new(hermitian_part(&gaussian_matrix(n, n, rng))).expect("Hermitian by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{identity, trace};
    use crate::rng::SeededRng;
    use crate::spectral::hermitian_eigenvalues;

    #[test]
    fn scalar_unitary_has_unit_modulus() {
        let u = random_unitary(1, &mut SeededRng::new(0, 0));
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitaries_are_unitary_and_reproducible() {
        for n in 1..=6 {
            let u = random_unitary(n, &mut SeededRng::new(9, n as u64));
            assert!((u.adjoint() * &u - identity(n)).norm() <= 1e-12);
            let v = random_unitary(n, &mut SeededRng::new(9, n as u64));
            assert_eq!(u, v);
        }
    }

    #[test]
    fn densities_are_valid() {
        assert_eq!(
            random_density(1, &mut SeededRng::new(0, 0)).matrix()[(0, 0)].re,
            1.0
        );
        for n in 1..=6 {
            let rho = random_density(n, &mut SeededRng::new(4, n as u64));
            assert!((trace(rho.matrix()).re - 1.0).abs() <= 1e-12);
            assert!(*hermitian_eigenvalues(rho.matrix()).last().unwrap() >= -1e-12);
            assert_eq!(rho, random_density(n, &mut SeededRng::new(4, n as u64)));
        }
    }

    #[test]
    fn isometry_columns_orthonormal() {
        let s = random_isometry(12, 3, &mut SeededRng::new(1, 1));
        assert!((s.adjoint() * &s - identity(3)).norm() <= 1e-12);
    }
}
