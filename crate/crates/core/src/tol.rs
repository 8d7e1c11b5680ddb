//! Numerical tolerances shared across the crate.

/// Hermiticity: `‖A − A†‖_F`.
pub const HERMITIAN: f64 = 1e-10;
/// Unit trace of a density matrix.
pub const TRACE: f64 = 1e-10;
/// Smallest admissible eigenvalue of a PSD matrix (as `-PSD`).
pub const PSD: f64 = 1e-10;
/// Spectral reconstruction and orthonormality.
pub const SPECTRAL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERATE: f64 = 1e-8;
/// Trace preservation `‖Σ K†K − I‖_F`, and Stiefel isometry.
pub const TRACE_PRESERVING: f64 = 1e-10;
/// Selective updates are refused below this outcome probability.
pub const PROBABILITY: f64 = 1e-12;
/// Choi eigenvalues at or below this are dropped when extracting operators.
pub const CHOI_CUTOFF: f64 = 1e-12;
/// Unitarity of coupling operators.
pub const UNITARY: f64 = 1e-10;
