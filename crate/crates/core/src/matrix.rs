//! Dense complex matrices and their JSON wire format.
//!
//! A matrix is serialized as a row-major array of rows, each row an array of
//! `[re, im]` pairs: `[[[1,0],[0,0]],[[0,0],[1,0]]]` is the 2×2 identity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Builds a square matrix from real diagonal entries.
pub fn diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

/// `|a⟩⟨b|` for column vectors stored as n×1 matrices or slices.
pub fn outer(a: &[C64], b: &[C64]) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

/// Computational basis vector `e_k` of length `n`.
pub fn basis(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[k] = ONE;
    v
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> CMatrix {
    diag(&[1.0, -1.0])
}

/// `‖A − A†‖_F`.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// `(A + A†) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// `Tr(A† B)`, the Frobenius inner product.
pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Invalid(format!(
            "expected a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !is_finite(a) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    Ok(a.nrows())
}

pub(crate) fn ensure_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Row-major nested `[re, im]` representation.
pub fn to_rows(a: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|i| {
            (0..a.ncols())
                .map(|j| [a[(i, j)].re, a[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Invalid("ragged matrix rows".into()));
    }
    let m = CMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j][0], rows[i][j][1]));
    if !is_finite(&m) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    Ok(m)
}

/// Serde adapter: `#[serde(with = "kraus_landscape::matrix::serde_matrix")]`.
pub mod serde_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(a: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(a).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<CMatrix>`.
pub mod serde_matrix_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let raw = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        raw.iter()
            .map(|rows| from_rows(rows).map_err(D::Error::custom))
            .collect()
    }
}

/// Newtype that serializes a bare matrix in the wire format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonMatrix(#[serde(with = "serde_matrix")] pub CMatrix);
