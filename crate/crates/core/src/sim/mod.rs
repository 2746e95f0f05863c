//! Markov-chain models over coarse states, trajectory sampling, and the
//! fluctuation and efficiency checks evaluated on sampled transitions.

mod checks;
mod model;
mod sample;

pub use checks::{
    adaptivity_bound_check, analytic_expectation, complexity_table, coupled_bound_sweep, efficiency_bound_check,
    ift_check, irreversible_changes, markov_tail_check, surprisal_control, Agent, BoundCheckResult, BoundKind,
    Coupling, HoldsRate, IftReport, IftStat, ROUNDING_ALLOWANCE, SIGMA_ALLOWANCE,
};
pub use model::{MarkovModel, RawModel, PROBABILITY_TOLERANCE, STATIONARY_RESIDUAL};
pub use sample::{sample_trajectories, sample_trajectory, substream, transition_counts, SeedRecord, Step, Trajectory};
