//! Complex Stiefel geometry for stacked Kraus operators.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kraus::StiefelPoint;
use crate::matrix::{c, hermitian_part, CMatrix, C64};
use crate::random::gaussian_matrix;
use crate::spectral::eigh;

/// Projection onto the tangent space: `G − S·herm(S†G)`.
pub fn riemannian_gradient(s: &StiefelPoint, g: &CMatrix) -> CMatrix {
    let sm = s.matrix();
    g - sm * hermitian_part(&(sm.adjoint() * g))
}

/// `‖herm(S†T)‖_F`, zero for tangent vectors.
pub fn tangent_residual(s: &StiefelPoint, t: &CMatrix) -> f64 {
    hermitian_part(&(s.matrix().adjoint() * t)).norm()
}

/// Polar retraction `(S+T)((S+T)†(S+T))^{-1/2}`.
pub fn retract(s: &StiefelPoint, t: &CMatrix) -> Result<StiefelPoint> {
    if t.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(s.clone());
    }
    let m = s.matrix() + t;
    let gram = hermitian_part(&(m.adjoint() * &m));
    let (values, v) = eigh(&gram);
    let min = *values.last().unwrap();
    if !(min > 1e-14 * values[0].max(1.0)) {
        return Err(Error::RankDeficient);
    }
    let inv_sqrt = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c(1.0 / x.sqrt(), 0.0)),
    ));
    let polar = m * (&v * inv_sqrt * v.adjoint());
    Ok(StiefelPoint::new_unchecked(polar))
}

/// Random unit-norm tangent vector at `s`.
pub fn random_tangent<R: Rng + ?Sized>(s: &StiefelPoint, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(s.matrix().nrows(), s.dim(), rng);
    let t = riemannian_gradient(s, &g);
    let norm = t.norm();
    t / c(norm, 0.0)
}
