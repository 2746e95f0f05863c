//! Hardware substrates as multiplicative overhead models, and Φ comparisons of
//! one fixed algorithm across several substrates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    self, intelligence_score, modeled_energy, ExecutionTrace, TaskRecord, TaskSuite,
};
use crate::par::Exec;

/// Where a substrate's overhead figure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverheadSource {
    /// Shipped illustrative default.
    Default,
    #[default]
    User,
    /// Derived from a measured energy.
    BackSolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFactor {
    pub name: String,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substrate {
    pub name: String,
    /// Kelvin.
    pub temperature: f64,
    pub overhead_mem: f64,
    pub overhead_ctrl: f64,
    /// Additional multiplicative overheads beyond memory and control.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_factors: Vec<NamedFactor>,
    #[serde(rename = "yield")]
    pub algorithmic_yield: f64,
    #[serde(default)]
    pub overhead_source: OverheadSource,
}

impl Substrate {
    pub fn new(
        name: impl Into<String>,
        temperature: f64,
        overhead_mem: f64,
        overhead_ctrl: f64,
        algorithmic_yield: f64,
    ) -> Result<Self> {
        let s = Substrate {
            name: name.into(),
            temperature,
            overhead_mem,
            overhead_ctrl,
            extra_factors: Vec::new(),
            algorithmic_yield,
            overhead_source: OverheadSource::User,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        metrics::check_positive("temperature", self.temperature)?;
        metrics::check_positive("yield", self.algorithmic_yield)?;
        let factors = [("overhead_mem", self.overhead_mem), ("overhead_ctrl", self.overhead_ctrl)]
            .into_iter()
            .chain(self.extra_factors.iter().map(|f| (f.name.as_str(), f.factor)));
        for (name, f) in factors {
            if !f.is_finite() || f < 1.0 {
                return Err(Error::invalid(name, format!("overhead factor must be >= 1, got {f}")));
            }
        }
        Ok(())
    }
}

/// `F = F_mem × F_ctrl × Π extra`.
pub fn total_overhead(substrate: &Substrate) -> f64 {
    substrate
        .extra_factors
        .iter()
        .fold(substrate.overhead_mem * substrate.overhead_ctrl, |acc, f| acc * f.factor)
}

/// Effective irreversible operations `F × N`.
pub fn effective_ops(substrate: &Substrate, intrinsic_ops: u64) -> f64 {
    total_overhead(substrate) * intrinsic_ops as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateRun {
    pub substrate: Substrate,
    pub trace: ExecutionTrace,
    pub suite: TaskSuite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub substrate: String,
    #[serde(with = "crate::serde_inf")]
    pub overhead: f64,
    pub overhead_source: OverheadSource,
    pub effective_ops: f64,
    pub energy: f64,
    pub power: f64,
    pub intelligence: f64,
    pub phi: f64,
    #[serde(with = "crate::serde_inf")]
    pub lower_bound: f64,
    #[serde(with = "crate::serde_inf")]
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Sorted ascending by Φ, ties by substrate name.
    pub rows: Vec<ComparisonRow>,
    pub ordering: Vec<String>,
}

fn canonical_tasks(suite: &TaskSuite) -> Vec<&TaskRecord> {
    let mut v: Vec<&TaskRecord> = suite.tasks.iter().collect();
    v.sort_by(|a, b| a.id.cmp(&b.id));
    v
}

fn evaluate(run: &SubstrateRun) -> Result<ComparisonRow> {
    let s = &run.substrate;
    s.validate()?;
    let f = total_overhead(s);
    let energy = modeled_energy(&run.trace, f, s.temperature)?;
    let intelligence = intelligence_score(&run.suite)?;
    let report = metrics::wpi_report(
        &energy,
        intelligence,
        s.temperature,
        s.algorithmic_yield,
        run.trace.duration,
    )?;
    let (overhead, overhead_source) = if energy.measured {
        (energy.overhead_factor_used, OverheadSource::BackSolved)
    } else {
        (f, s.overhead_source)
    };
    Ok(ComparisonRow {
        substrate: s.name.clone(),
        overhead,
        overhead_source,
        effective_ops: effective_ops(s, run.trace.irreversible_ops),
        energy: energy.energy,
        power: energy.power,
        intelligence: intelligence.value(),
        phi: report.phi,
        lower_bound: report.lower_bound,
        slack: report.slack,
    })
}

/// Evaluates Φ for the same algorithm on each substrate and orders them.
pub fn run_comparison(runs: &[SubstrateRun], exec: Exec) -> Result<ComparisonReport> {
    if runs.len() < 2 {
        return Err(Error::ComparisonMismatch(format!(
            "need at least 2 runs, got {}",
            runs.len()
        )));
    }
    let reference = &runs[0];
    let reference_tasks = canonical_tasks(&reference.suite);
    for run in &runs[1..] {
        if canonical_tasks(&run.suite) != reference_tasks {
            return Err(Error::ComparisonMismatch(format!(
                "substrate `{}` runs a different task suite than `{}`",
                run.substrate.name, reference.substrate.name
            )));
        }
        if run.trace.irreversible_ops != reference.trace.irreversible_ops {
            return Err(Error::ComparisonMismatch(format!(
                "substrate `{}` has N = {} but `{}` has N = {}",
                run.substrate.name,
                run.trace.irreversible_ops,
                reference.substrate.name,
                reference.trace.irreversible_ops
            )));
        }
    }

    let mut rows = exec
        .map_slice(runs, evaluate)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.phi.total_cmp(&b.phi).then_with(|| a.substrate.cmp(&b.substrate)));
    let ordering = rows.iter().map(|r| r.substrate.clone()).collect();
    Ok(ComparisonReport { rows, ordering })
}

/// Illustrative CPU / GPU / neuromorphic catalog with F = 200, 20 and 4 at 300 K.
/// These overheads are placeholders, not measurements.
pub fn default_catalog() -> Vec<Substrate> {
    let s = |name: &str, mem: f64, ctrl: f64| Substrate {
        name: name.to_string(),
        temperature: 300.0,
        overhead_mem: mem,
        overhead_ctrl: ctrl,
        extra_factors: Vec::new(),
        algorithmic_yield: 1.0,
        overhead_source: OverheadSource::Default,
    };
    vec![s("CPU", 40.0, 5.0), s("GPU", 4.0, 5.0), s("neuro", 2.0, 2.0)]
}
