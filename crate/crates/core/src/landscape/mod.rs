//! The observable landscape `J[{K_ν}] = Tr[Â Σ_ν K_ν ρ0 K_ν†]` over Kraus maps.
//!
//! Maps are parameterized by Stiefel points `S` (stacked operators with
//! `S†S = I`). The real inner product `⟨X, Y⟩ = Re Tr(X†Y)` is used
//! throughout, under which the Euclidean gradient has blocks `2 Â K_ν ρ0`.

pub mod ascent;
pub mod critical;
pub mod geometry;
pub mod objective;
pub mod sweep;
pub mod universal;

pub use ascent::{ascend, AscentConfig, AscentResult, Termination};
pub use critical::{classify_critical, Classification, CriticalReport, ProbeConfig};
pub use geometry::{random_tangent, retract, riemannian_gradient, tangent_residual};
pub use objective::{euclidean_gradient, objective_at, objective_value, Objective};
pub use sweep::{sweep, sweep_with, SweepRun, SweepSummary};
pub use universal::{eigenstate_preparation, preparation_map, universal_map};
