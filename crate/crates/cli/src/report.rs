//! Report bundle, TSV tables and atomic output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use wpi_core::entropy::EstimatorKind;
use wpi_core::metrics::{EnergyReport, WpiReport};
use wpi_core::sim::{BoundCheckResult, HoldsRate, IftReport, Trajectory};
use wpi_core::substrate::{ComparisonReport, OverheadSource};

use crate::config::InputDigest;
use crate::error::{CliError, Result};

pub const REPORT_JSON: &str = "report.json";
pub const COMPARE_TSV: &str = "compare.tsv";
pub const BOUNDS_TSV: &str = "bounds.tsv";
pub const TRAJECTORIES_TSV: &str = "trajectories.tsv";

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// SHA-256 of the config file bytes.
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub samples: usize,
    pub steps: usize,
    pub delta: f64,
    pub estimator: EstimatorKind,
    /// RFC 3339, UTC. The only field that differs between identical runs.
    pub timestamp: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Units {
    pub intelligence: &'static str,
    pub energy: &'static str,
    pub power: &'static str,
    pub phi: &'static str,
    pub complexity: &'static str,
    pub coupled_energy: &'static str,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            intelligence: "dimensionless weighted task score",
            energy: "J",
            power: "W",
            phi: "W per intelligence unit",
            complexity: "bits",
            coupled_energy: "k_B T ln 2 per bit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreRow {
    pub suite: String,
    pub tasks: usize,
    pub total_weight: f64,
    pub intelligence: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WpiRow {
    pub substrate: String,
    pub suite: String,
    pub overhead_source: OverheadSource,
    pub energy: EnergyReport,
    pub intelligence: f64,
    pub wpi: WpiReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationRow {
    pub model: String,
    pub trajectories: usize,
    pub steps: usize,
    /// `transition_counts[from][to]`, states in model order.
    pub transition_counts: Vec<Vec<u64>>,
    pub ift: IftReport,
}

/// Pass/fail of one asserted check.
#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub check: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelBounds {
    pub model: String,
    pub ift: IftReport,
    pub markov_tail: BoundCheckResult,
    pub efficiency: HoldsRate,
    pub adaptivity: HoldsRate,
    pub gates: Vec<Gate>,
}

impl ModelBounds {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub metadata: Metadata,
    pub units: Units,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scores: Vec<ScoreRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub wpi: Vec<WpiRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison_skipped: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub simulations: Vec<SimulationRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<ModelBounds>,
}

impl ReportBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    pub fn all_gates_passed(&self) -> bool {
        self.bounds.iter().all(ModelBounds::passed)
    }
}

/// Tab-separated table with a header row.
#[derive(Debug, Default)]
pub struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            rows: vec![header.iter().map(|s| s.to_string()).collect()],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.rows[0].len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip form; scientific outside `[1e-4, 1e16)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Rows in descending Φ, so the highest-dissipation substrate comes first.
pub fn compare_table(report: &ComparisonReport) -> Table {
    let mut t = Table::new(&[
        "substrate",
        "overhead",
        "overhead_source",
        "effective_ops",
        "energy_j",
        "power_w",
        "intelligence",
        "phi",
        "lower_bound",
        "slack",
    ]);
    for r in report.rows.iter().rev() {
        t.push(vec![
            r.substrate.clone(),
            num(r.overhead),
            source_name(r.overhead_source).to_string(),
            num(r.effective_ops),
            num(r.energy),
            num(r.power),
            num(r.intelligence),
            num(r.phi),
            num(r.lower_bound),
            num(r.slack),
        ]);
    }
    t
}

pub fn source_name(s: OverheadSource) -> &'static str {
    match s {
        OverheadSource::Default => "default",
        OverheadSource::User => "user",
        OverheadSource::BackSolved => "back-solved",
    }
}

const BOUNDS_HEADER: [&str; 15] = [
    "model",
    "check",
    "estimator",
    "delta",
    "samples",
    "evaluated",
    "lhs",
    "rhs",
    "slack",
    "holds",
    "allowance",
    "holds_rate",
    "threshold",
    "passed",
    "gated",
];

/// One row per check and model. For the fluctuation rows `lhs` is the sample
/// mean and `rhs` its exact expectation; for the coupled bounds `lhs`/`rhs`
/// are means over evaluated transitions and `slack` is the minimum.
pub fn bounds_table(bounds: &[ModelBounds]) -> Table {
    let mut t = Table::new(&BOUNDS_HEADER);
    let b = |v: bool| v.to_string();
    let gated = |m: &ModelBounds, check: &str| m.gates.iter().any(|g| g.check == check);
    for m in bounds {
        let est = m.ift.estimator.to_string();
        let c = &m.ift.complexity;
        t.push(vec![
            m.model.clone(),
            "ift-complexity".into(),
            est.clone(),
            String::new(),
            c.samples.to_string(),
            c.samples.to_string(),
            num(c.mean),
            num(c.analytic),
            num(c.analytic - c.mean),
            b(!c.exceeds_one),
            num(3.0 * c.std_err),
            String::new(),
            String::new(),
            b(!c.exceeds_one),
            b(gated(m, "ift-complexity")),
        ]);
        if let Some(s) = &m.ift.surprisal {
            t.push(vec![
                m.model.clone(),
                "ift-surprisal".into(),
                String::new(),
                String::new(),
                s.samples.to_string(),
                s.samples.to_string(),
                num(s.mean),
                num(s.analytic),
                num(s.analytic - s.mean),
                b(s.matches_analytic()),
                num(3.0 * s.std_err),
                String::new(),
                String::new(),
                b(s.matches_analytic()),
                b(gated(m, "ift-surprisal")),
            ]);
        }
        let r = &m.markov_tail;
        t.push(vec![
            m.model.clone(),
            "markov-tail".into(),
            est.clone(),
            num(r.delta),
            r.samples.to_string(),
            r.samples.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.slack),
            b(r.holds),
            num(r.allowance),
            String::new(),
            String::new(),
            b(r.holds_within_allowance()),
            b(gated(m, "markov-tail")),
        ]);
        for (name, h) in [("efficiency", &m.efficiency), ("adaptivity", &m.adaptivity)] {
            t.push(vec![
                m.model.clone(),
                name.into(),
                est.clone(),
                num(h.delta),
                h.transitions.to_string(),
                h.evaluated.to_string(),
                num(h.mean_lhs),
                num(h.mean_rhs),
                num(h.min_slack),
                b(h.holds == h.evaluated),
                num(3.0 * h.std_err),
                num(h.holds_rate),
                num(h.threshold),
                b(h.passed),
                b(gated(m, name)),
            ]);
        }
    }
    t
}

pub fn scores_table(rows: &[ScoreRow]) -> Table {
    let mut t = Table::new(&["suite", "tasks", "total_weight", "intelligence"]);
    for r in rows {
        t.push(vec![r.suite.clone(), r.tasks.to_string(), num(r.total_weight), num(r.intelligence)]);
    }
    t
}

pub fn wpi_table(rows: &[WpiRow]) -> Table {
    let mut t = Table::new(&[
        "substrate",
        "suite",
        "overhead",
        "overhead_source",
        "energy_j",
        "power_w",
        "intelligence",
        "phi",
        "lower_bound",
        "slack",
        "reversible_floor",
    ]);
    for r in rows {
        t.push(vec![
            r.substrate.clone(),
            r.suite.clone(),
            num(r.energy.overhead_factor_used),
            source_name(r.overhead_source).to_string(),
            num(r.energy.energy),
            num(r.energy.power),
            num(r.intelligence),
            num(r.wpi.phi),
            num(r.wpi.lower_bound),
            num(r.wpi.slack),
            num(r.wpi.reversible_floor),
        ]);
    }
    t
}

pub fn simulations_table(rows: &[SimulationRow]) -> Table {
    let mut t = Table::new(&[
        "model",
        "trajectories",
        "steps",
        "estimator",
        "ift_mean",
        "ift_std_err",
        "ift_analytic",
        "ift_exceeds_one",
        "surprisal_mean",
        "surprisal_std_err",
        "surprisal_analytic",
    ]);
    for r in rows {
        let c = &r.ift.complexity;
        let (sm, se, sa) = match &r.ift.surprisal {
            Some(s) => (num(s.mean), num(s.std_err), num(s.analytic)),
            None => Default::default(),
        };
        t.push(vec![
            r.model.clone(),
            r.trajectories.to_string(),
            r.steps.to_string(),
            r.ift.estimator.to_string(),
            num(c.mean),
            num(c.std_err),
            num(c.analytic),
            c.exceeds_one.to_string(),
            sm,
            se,
            sa,
        ]);
    }
    t
}

pub fn trajectories_table(model: &str, trajectories: &[Trajectory], out: &mut Table) {
    for (i, tr) in trajectories.iter().enumerate() {
        for (k, s) in tr.steps.iter().enumerate() {
            out.push(vec![
                model.to_string(),
                i.to_string(),
                k.to_string(),
                s.from.to_string(),
                s.to.to_string(),
                num(s.prob),
            ]);
        }
    }
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory and a rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::io(format!("cannot create temporary file in {}", dir.display()), e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(format!("cannot write {}", target.display()), e))?;
    tmp.persist(&target)
        .map_err(|e| CliError::io(format!("cannot move output into {}", target.display()), e.error))?;
    Ok(())
}
