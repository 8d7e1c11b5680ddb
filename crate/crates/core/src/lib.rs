//! Kraus-map control landscapes.
//!
//! Every control scheme handled here (open-loop, measurement-based feedback
//! on a single system or an ensemble, coherent feedback through an auxiliary
//! quantum controller) is reduced to a completely positive trace-preserving
//! map `Φ`. The objective `J[Φ] = Tr[Â Φ(ρ0)]` is then optimized over the
//! Stiefel parameterization of Kraus operators, its critical points are
//! probed for curvature, and the constant-output map that is optimal for
//! every initial state is constructed explicitly.
//!
//! Module map:
//!
//! * [`matrix`], [`state`], [`spectral`], [`random`], [`rng`]: complex
//!   matrices, states, observables, tensor algebra and seeded sampling.
//! * [`kraus`]: operator lists, Stiefel points and Choi matrices.
//! * [`measurement`]: generalized measurements and their updates.
//! * [`feedback`]: feedback iterations and processes, Monte Carlo
//!   trajectories, ensemble and coherent feedback.
//! * [`landscape`]: objective, gradients, ascent, critical-point probing,
//!   the universal optimal map, multi-start sweeps.

// `!(x > eps)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod feedback;
pub mod kraus;
pub mod landscape;
pub mod matrix;
pub mod measurement;
pub mod par;
pub mod random;
pub mod rng;
pub mod spectral;
pub mod state;
pub mod tol;

/// Library version, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use kraus::{ChoiMatrix, KrausMap, StiefelPoint};
pub use matrix::{CMatrix, C64};
pub use measurement::{GeneralizedMeasurement, MeasurementRecord};
pub use par::Execution;
pub use rng::SeededRng;
pub use spectral::SpectralDecomposition;
pub use state::{DensityMatrix, Observable, Subsystem};
