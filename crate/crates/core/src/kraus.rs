//! Kraus maps and their three coordinate systems.
//!
//! A map on an `n`-level system is stored as its ordered operator list
//! `{K_ν}`. Equivalent views:
//!
//! * [`StiefelPoint`]: the `nL×n` vertical stack `S = [K_0; K_1; …]`, for
//!   which trace preservation `Σ K_ν†K_ν = I` reads `S†S = I`.
//! * [`ChoiMatrix`]: `C = Σ_ij E_ij ⊗ Φ(E_ij)` with the input on the left
//!   factor. `C ⪰ 0` iff the map is completely positive, and tracing out the
//!   right (output) factor gives `I` iff it is trace preserving.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, ensure_dim, ensure_square, hermitian_part, CMatrix, C64};
use crate::random::random_isometry;
use crate::spectral::{eigh, hermitian_eigenvalues};
use crate::state::{partial_trace_matrix, DensityMatrix, Subsystem};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KrausMapJson", into = "KrausMapJson")]
pub struct KrausMap {
    n: usize,
    ops: Vec<CMatrix>,
    /// Trace preservation was verified at construction.
    checked: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausMapJson {
    n: usize,
    #[serde(with = "matrix::serde_matrix_vec")]
    operators: Vec<CMatrix>,
}

impl TryFrom<KrausMapJson> for KrausMap {
    type Error = Error;
    fn try_from(j: KrausMapJson) -> Result<Self> {
        let map = KrausMap::new(j.operators)?;
        ensure_dim(j.n, map.n)?;
        Ok(map)
    }
}

impl From<KrausMap> for KrausMapJson {
    fn from(m: KrausMap) -> Self {
        KrausMapJson {
            n: m.n,
            operators: m.ops,
        }
    }
}

/// `‖Σ K†K − I‖_F`.
pub fn tp_residual(ops: &[CMatrix]) -> f64 {
    let n = ops[0].nrows();
    let mut sum = -matrix::identity(n);
    for k in ops {
        sum += k.adjoint() * k;
    }
    sum.norm()
}

fn check_shapes(ops: &[CMatrix]) -> Result<usize> {
    let first = ops
        .first()
        .ok_or_else(|| Error::Invalid("a Kraus map needs at least one operator".into()))?;
    let n = ensure_square(first)?;
    for k in ops {
        ensure_dim(n, ensure_square(k)?)?;
    }
    Ok(n)
}

impl KrausMap {
    /// Builds a map, rejecting operator lists that are not trace preserving.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let n = check_shapes(&ops)?;
        let residual = tp_residual(&ops);
        if residual > tol::TRACE_PRESERVING {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self {
            n,
            ops,
            checked: true,
        })
    }

    /// Accepts any well-shaped operator list. Intended for diagnostics with
    /// [`validate`]; [`apply`] re-checks trace preservation on such maps.
    pub fn from_operators_unchecked(ops: Vec<CMatrix>) -> Result<Self> {
        let n = check_shapes(&ops)?;
        Ok(Self {
            n,
            ops,
            checked: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            ops: vec![matrix::identity(n)],
            checked: true,
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `Φ(ρ) = I/n` for every state.
    pub fn completely_depolarizing(n: usize) -> Self {
        let scale = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        let ops = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| matrix::outer(&matrix::basis(n, a), &matrix::basis(n, b)) * scale)
            .collect();
        Self {
            n,
            ops,
            checked: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of operators `L`.
    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn into_operators(self) -> Vec<CMatrix> {
        self.ops
    }

    pub fn tp_residual(&self) -> f64 {
        tp_residual(&self.ops)
    }
}

/// `Σ K ρ K†` on a raw matrix, no validation.
pub fn apply_matrix(phi: &KrausMap, rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(phi.n, phi.n);
    for k in &phi.ops {
        out += k * rho * k.adjoint();
    }
    out
}

pub fn apply(phi: &KrausMap, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ensure_dim(phi.n, rho.dim())?;
    if !phi.checked {
        let residual = phi.tp_residual();
        if residual > tol::TRACE_PRESERVING {
            return Err(Error::NotTracePreserving { residual });
        }
    }
    DensityMatrix::new(hermitian_part(&apply_matrix(phi, rho.matrix())))
}

/// `phi2 ∘ phi1`. Products `{K2_μ K1_ν}` are re-extracted through the Choi
/// matrix once their count exceeds `n²`.
pub fn compose(phi2: &KrausMap, phi1: &KrausMap) -> Result<KrausMap> {
    ensure_dim(phi2.n, phi1.n)?;
    let ops: Vec<CMatrix> = phi2
        .ops
        .iter()
        .flat_map(|k2| phi1.ops.iter().map(move |k1| k2 * k1))
        .collect();
    let product = KrausMap::new(ops)?;
    if product.rank() > product.n * product.n {
        canonicalize(&product)
    } else {
        Ok(product)
    }
}

/// Canonical (Choi-eigenvector) operators of the same superoperator, `L ≤ n²`.
pub fn canonicalize(phi: &KrausMap) -> Result<KrausMap> {
    from_choi(&to_choi(phi), tol::CHOI_CUTOFF)
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub operators: usize,
    pub tp_residual: f64,
    pub choi_min_eigenvalue: f64,
    pub choi_rank: usize,
    pub trace_preserving: bool,
    pub completely_positive: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }
}

/// Diagnostic report; never fails.
pub fn validate(phi: &KrausMap) -> ValidationReport {
    let tp = phi.tp_residual();
    let eig = hermitian_eigenvalues(to_choi(phi).matrix());
    let min = *eig.last().unwrap();
    ValidationReport {
        dim: phi.n,
        operators: phi.rank(),
        tp_residual: tp,
        choi_min_eigenvalue: min,
        choi_rank: eig.iter().filter(|&&x| x > tol::CHOI_CUTOFF).count(),
        trace_preserving: tp <= tol::TRACE_PRESERVING,
        completely_positive: min >= -tol::PSD,
    }
}

/// Vertical stack of the `L` operators, an `nL×n` isometry.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    n: usize,
    l: usize,
    s: CMatrix,
}

/// `‖S†S − I‖_F`.
pub fn isometry_residual(s: &CMatrix) -> f64 {
    (s.adjoint() * s - matrix::identity(s.ncols())).norm()
}

impl StiefelPoint {
    pub fn new(s: CMatrix) -> Result<Self> {
        let (rows, n) = s.shape();
        if n == 0 || rows % n != 0 || rows == 0 {
            return Err(Error::Invalid(format!("{rows}×{n} is not an nL×n stack")));
        }
        if !matrix::is_finite(&s) {
            return Err(Error::Invalid("matrix has non-finite entries".into()));
        }
        let residual = isometry_residual(&s);
        if residual > tol::TRACE_PRESERVING {
            return Err(Error::NotIsometry { residual });
        }
        Ok(Self { n, l: rows / n, s })
    }

    pub(crate) fn new_unchecked(s: CMatrix) -> Self {
        let n = s.ncols();
        Self {
            n,
            l: s.nrows() / n,
            s,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.l
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.s
    }

    /// Operator `K_ν`, the `ν`-th `n×n` block.
    pub fn block(&self, nu: usize) -> CMatrix {
        self.s.rows(nu * self.n, self.n).into_owned()
    }

    pub fn blocks(&self) -> impl Iterator<Item = CMatrix> + '_ {
        (0..self.l).map(|nu| self.block(nu))
    }
}

pub fn to_stiefel(phi: &KrausMap) -> Result<StiefelPoint> {
    let n = phi.n;
    let mut s = CMatrix::zeros(n * phi.rank(), n);
    for (nu, k) in phi.ops.iter().enumerate() {
        s.rows_mut(nu * n, n).copy_from(k);
    }
    StiefelPoint::new(s)
}

pub fn from_stiefel(point: &StiefelPoint) -> KrausMap {
    KrausMap {
        n: point.n,
        ops: point.blocks().collect(),
        checked: true,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    c: CMatrix,
}

impl ChoiMatrix {
    /// Checks shape (`n²×n²`) and Hermiticity. Positivity and trace
    /// preservation are properties to query, not preconditions.
    pub fn new(c: CMatrix) -> Result<Self> {
        let d = ensure_square(&c)?;
        let n = (d as f64).sqrt().round() as usize;
        if n * n != d || n == 0 {
            return Err(Error::Invalid(format!(
                "Choi dimension {d} is not a square"
            )));
        }
        let residual = matrix::hermitian_residual(&c);
        if residual > tol::HERMITIAN {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self {
            n,
            c: hermitian_part(&c),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *hermitian_eigenvalues(&self.c).last().unwrap()
    }

    /// `‖Tr_out C − I‖_F`.
    pub fn tp_residual(&self) -> f64 {
        let reduced = partial_trace_matrix(&self.c, (self.n, self.n), Subsystem::Plant)
            .expect("n²-square by construction");
        (reduced - matrix::identity(self.n)).norm()
    }
}

/// Column-stacked operators: `V[i·n + k, ν] = K_ν[k, i]`, so that `C = V V†`.
fn vectorized(phi: &KrausMap) -> CMatrix {
    let n = phi.n;
    CMatrix::from_fn(n * n, phi.rank(), |row, nu| {
        let (i, k) = (row / n, row % n);
        phi.ops[nu][(k, i)]
    })
}

pub fn to_choi(phi: &KrausMap) -> ChoiMatrix {
    let v = vectorized(phi);
    ChoiMatrix {
        n: phi.n,
        c: hermitian_part(&(&v * v.adjoint())),
    }
}

/// Canonical operators `√λ_k · unvec(w_k)` for Choi eigenpairs with
/// `λ_k > cutoff`, in descending eigenvalue order.
pub fn from_choi(choi: &ChoiMatrix, cutoff: f64) -> Result<KrausMap> {
    let n = choi.n;
    let (values, vectors) = eigh(&choi.c);
    let min = *values.last().unwrap();
    if min < -tol::PSD {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min,
        });
    }
    let ops: Vec<CMatrix> = values
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > cutoff)
        .map(|(k, &lam)| {
            let w = vectors.column(k);
            let scale = C64::new(lam.sqrt(), 0.0);
            CMatrix::from_fn(n, n, |r, c| w[c * n + r] * scale)
        })
        .collect();
    if ops.is_empty() {
        return Err(Error::Invalid(
            "Choi matrix has no eigenvalue above the cutoff".into(),
        ));
    }
    KrausMap::new(ops)
}

/// `‖C(Φ1) − C(Φ2)‖_F`; zero iff the maps agree as superoperators.
pub fn map_distance(phi1: &KrausMap, phi2: &KrausMap) -> Result<f64> {
    ensure_dim(phi1.n, phi2.n)?;
    Ok((to_choi(phi1).c - to_choi(phi2).c).norm())
}

/// Haar-random point of the `nL×n` Stiefel manifold, read as `L` operators.
pub fn random_stiefel<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> StiefelPoint {
    StiefelPoint::new_unchecked(random_isometry(n * l, n, rng))
}

pub fn random_kraus<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> KrausMap {
    from_stiefel(&random_stiefel(n, l, rng))
}

/// `K'_μ = Σ_ν V_{μν} K_ν` for an `M×L` isometry `V`; same superoperator.
pub fn remix(phi: &KrausMap, v: &CMatrix) -> Result<KrausMap> {
    if v.ncols() != phi.rank() {
        return Err(Error::DimensionMismatch {
            expected: phi.rank(),
            got: v.ncols(),
        });
    }
    let ops = (0..v.nrows())
        .map(|mu| {
            phi.ops
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(phi.n, phi.n), |acc, (nu, k)| {
                    acc + k * v[(mu, nu)]
                })
        })
        .collect();
    KrausMap::new(ops)
}
