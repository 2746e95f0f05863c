//! Complexity estimators and per-state algorithmic entropy.
//!
//! Kolmogorov complexity is uncomputable, so every estimate is tagged with the
//! estimator that produced it:
//!
//! * [`ExactEnum`]: shortest program on the [`machine::ReferenceMachine`],
//!   found by exhaustive shortlex enumeration. Only for short states.
//! * [`LzProxy`]: LZ78 codelength, see [`lz`].
//!
//! All logarithms are base 2.

pub mod lz;
pub mod machine;
mod state;

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::landauer_constant;
use crate::par::Exec;

pub use state::{parse_corpus, CoarseState, StateMeasure};

use machine::{ReferenceMachine, MAX_PROGRAM_LEN, MAX_TARGET_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    ExactEnum,
    LzProxy,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorKind::ExactEnum => "exact-enum",
            EstimatorKind::LzProxy => "lz-proxy",
        })
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-enum" => Ok(EstimatorKind::ExactEnum),
            "lz-proxy" => Ok(EstimatorKind::LzProxy),
            other => Err(Error::invalid("estimator", format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub bits: u64,
    pub estimator: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional_on: Option<CoarseState>,
}

/// Something that can estimate `K(x)` and `K(x|y)`.
pub trait ComplexityEstimator: Sync {
    fn kind(&self) -> EstimatorKind;
    fn complexity(&self, x: &CoarseState) -> Result<ComplexityEstimate>;
    fn conditional(&self, x: &CoarseState, y: &CoarseState) -> Result<ComplexityEstimate>;
}

/// LZ78 codelength proxy.
#[derive(Debug, Clone, Copy, Default)]
pub struct LzProxy;

impl ComplexityEstimator for LzProxy {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::LzProxy
    }

    fn complexity(&self, x: &CoarseState) -> Result<ComplexityEstimate> {
        Ok(complexity_lz(x))
    }

    fn conditional(&self, x: &CoarseState, y: &CoarseState) -> Result<ComplexityEstimate> {
        Ok(ComplexityEstimate {
            bits: lz::conditional_codelength(x.bits(), y.bits()),
            estimator: EstimatorKind::LzProxy,
            conditional_on: Some(y.clone()),
        })
    }
}

pub fn complexity_lz(x: &CoarseState) -> ComplexityEstimate {
    ComplexityEstimate {
        bits: lz::codelength(x.bits()),
        estimator: EstimatorKind::LzProxy,
        conditional_on: None,
    }
}

/// (target, input tape) -> shortest program length, None when over budget.
type SearchMemo = Mutex<HashMap<(Vec<u8>, Vec<u8>), Option<u32>>>;

/// Exact complexity relative to the reference machine, with a memo of past
/// searches. Search results are identical for sequential and parallel runs.
#[derive(Debug)]
pub struct ExactEnum {
    pub machine: ReferenceMachine,
    pub max_len: u32,
    pub exec: Exec,
    cache: SearchMemo,
}

impl Clone for ExactEnum {
    fn clone(&self) -> Self {
        ExactEnum::new(self.machine, self.max_len, self.exec)
    }
}

impl Default for ExactEnum {
    fn default() -> Self {
        ExactEnum::new(ReferenceMachine::default(), MAX_PROGRAM_LEN, Exec::default())
    }
}

impl ExactEnum {
    pub fn new(machine: ReferenceMachine, max_len: u32, exec: Exec) -> Self {
        ExactEnum {
            machine,
            max_len,
            exec,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn search(&self, x: &CoarseState, input: &[u8]) -> Result<u64> {
        check_exact_bounds(x, self.max_len)?;
        let key = (x.bits().to_vec(), input.to_vec());
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key).copied() {
            return found(hit, x, self.max_len);
        }
        let result = self.machine.shortest(x.bits(), input, self.max_len, self.exec);
        self.cache.lock().expect("cache poisoned").insert(key, result);
        found(result, x, self.max_len)
    }
}

fn check_exact_bounds(x: &CoarseState, max_len: u32) -> Result<()> {
    if x.len() > MAX_TARGET_LEN {
        return Err(Error::invalid(
            "state",
            format!("exact enumeration supports at most {MAX_TARGET_LEN} bits, got {}", x.len()),
        ));
    }
    if max_len > MAX_PROGRAM_LEN {
        return Err(Error::invalid(
            "max_len",
            format!("exact enumeration supports programs of at most {MAX_PROGRAM_LEN} bits, got {max_len}"),
        ));
    }
    Ok(())
}

fn found(result: Option<u32>, x: &CoarseState, max_len: u32) -> Result<u64> {
    result.map(u64::from).ok_or_else(|| Error::EnumerationBudgetExceeded {
        target: x.to_string(),
        max_len,
    })
}

impl ComplexityEstimator for ExactEnum {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::ExactEnum
    }

    fn complexity(&self, x: &CoarseState) -> Result<ComplexityEstimate> {
        Ok(ComplexityEstimate {
            bits: self.search(x, &[])?,
            estimator: EstimatorKind::ExactEnum,
            conditional_on: None,
        })
    }

    fn conditional(&self, x: &CoarseState, y: &CoarseState) -> Result<ComplexityEstimate> {
        check_exact_bounds(y, self.max_len)?;
        Ok(ComplexityEstimate {
            bits: self.search(x, y.bits())?,
            estimator: EstimatorKind::ExactEnum,
            conditional_on: Some(y.clone()),
        })
    }
}

/// Shortest program for `x` on `machine` among programs of at most `max_len`
/// bits. Fails with [`Error::EnumerationBudgetExceeded`] when none exists.
pub fn complexity_exact(x: &CoarseState, machine: &ReferenceMachine, max_len: u32) -> Result<ComplexityEstimate> {
    ExactEnum::new(*machine, max_len, Exec::default()).complexity(x)
}

/// Either estimator, chosen at runtime.
#[derive(Debug, Clone)]
pub enum Estimator {
    Exact(ExactEnum),
    Lz(LzProxy),
}

impl Estimator {
    pub fn from_kind(kind: EstimatorKind) -> Self {
        match kind {
            EstimatorKind::ExactEnum => Estimator::Exact(ExactEnum::default()),
            EstimatorKind::LzProxy => Estimator::Lz(LzProxy),
        }
    }

    fn inner(&self) -> &dyn ComplexityEstimator {
        match self {
            Estimator::Exact(e) => e,
            Estimator::Lz(e) => e,
        }
    }
}

impl ComplexityEstimator for Estimator {
    fn kind(&self) -> EstimatorKind {
        self.inner().kind()
    }
    fn complexity(&self, x: &CoarseState) -> Result<ComplexityEstimate> {
        self.inner().complexity(x)
    }
    fn conditional(&self, x: &CoarseState, y: &CoarseState) -> Result<ComplexityEstimate> {
        self.inner().conditional(x, y)
    }
}

pub fn conditional_complexity(
    x: &CoarseState,
    y: &CoarseState,
    estimator: &dyn ComplexityEstimator,
) -> Result<ComplexityEstimate> {
    estimator.conditional(x, y)
}

/// `S_π(x) = K(x) + log2 π(x)`. Negative whenever `π(x) < 2^-K(x)`.
pub fn algorithmic_entropy(x: &CoarseState, pi: &StateMeasure, estimator: &dyn ComplexityEstimator) -> Result<f64> {
    let w = pi.weight(x)?;
    Ok(estimator.complexity(x)?.bits as f64 + w.log2())
}

/// Entropy change of a transition `x -> y`, split into its irreversible
/// (complexity) and exchanged (measure) parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyDelta {
    /// `irreversible + exchanged`.
    pub total: f64,
    /// `K(y) - K(x)`.
    pub irreversible: f64,
    /// `log2 π(y) - log2 π(x)`, the sign under which `total` equals
    /// `S_π(y) - S_π(x)`.
    pub exchanged: f64,
}

impl EntropyDelta {
    fn new(irreversible: f64, exchanged: f64) -> Self {
        EntropyDelta {
            total: irreversible + exchanged,
            irreversible,
            exchanged,
        }
    }
}

pub fn entropy_decomposition(
    x: &CoarseState,
    y: &CoarseState,
    pi: &StateMeasure,
    estimator: &dyn ComplexityEstimator,
) -> Result<EntropyDelta> {
    let (wx, wy) = (pi.weight(x)?, pi.weight(y)?);
    let kx = estimator.complexity(x)?.bits as f64;
    let ky = estimator.complexity(y)?.bits as f64;
    Ok(EntropyDelta::new(ky - kx, wy.log2() - wx.log2()))
}

/// Landauer floor `k_B T ln 2 · max(0, Δ_iK)` for the irreversible part of a
/// change. Complexity decreases imply no positive floor.
pub fn min_energy_of_change(delta: &EntropyDelta, temperature: f64) -> Result<f64> {
    Ok(landauer_constant(temperature)? * delta.irreversible.max(0.0))
}
