//! Feedback control reduced to Kraus maps.
//!
//! * [`process`]: single-system discrete feedback. One iteration measures,
//!   then applies an outcome-dependent map; averaged over outcomes it is the
//!   Kraus map with operators `L_{ν,α} K_{α,β}`. A process composes them.
//! * [`trajectory`]: sampled runs of a process and their Monte Carlo mean,
//!   which converges to the composed map applied to the initial state.
//! * [`ensemble`]: feedback on the ensemble mean `Ō`, one map per bin of `Ō`.
//! * [`coherent`]: plant–controller unitary coupling; the reduced plant
//!   dynamics as an operator-sum.

pub mod coherent;
pub mod ensemble;
pub mod process;
pub mod trajectory;

pub use coherent::{coherent_induced_map, coherent_reduced_state, CoherentFeedbackSetup};
pub use ensemble::{
    ensemble_iteration_map, ensemble_process_map, EnsembleFeedbackIteration, EnsembleProcess,
    FeedbackBin,
};
pub use process::{iteration_map, process_map, random_process, FeedbackIteration, FeedbackProcess};
pub use trajectory::{
    monte_carlo_average, monte_carlo_average_with, simulate_trajectory, MonteCarloEstimate,
    Trajectory,
};
