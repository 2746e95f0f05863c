//! Energy-efficiency accounting for computational systems.
//!
//! * [`metrics`]: task-weighted intelligence scores, Landauer energy, power and
//!   watts-per-intelligence (Φ) with its thermodynamic floors.
//! * [`substrate`]: overhead-factor models of hardware and Φ comparisons.
//! * [`entropy`]: complexity estimators and per-state algorithmic entropy.
//! * [`sim`]: Monte Carlo checks of fluctuation and efficiency bounds on
//!   coarse-grained Markov chains.
//!
//! Data-parallel loops go through [`par::Exec`]; build without the default
//! `parallel` feature to get the sequential implementation only.

pub mod entropy;
pub mod error;
pub mod metrics;
pub mod par;
pub mod serde_inf;
pub mod sim;
pub mod stats;
pub mod substrate;

pub use error::{Error, Issue, Result};
