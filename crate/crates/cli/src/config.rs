//! Experiment configuration: the JSON file format and its validation.
//!
//! Structural problems (bad JSON, wrong types, unknown keys) stop at the first
//! one and carry a line/column. Semantic checks then run over the whole file
//! and report every problem with a JSON pointer.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wpi_core::entropy::{CoarseState, Estimator, EstimatorKind};
use wpi_core::metrics::{ExecutionTrace, TaskRecord, TaskSuite};
use wpi_core::sim::{MarkovModel, RawModel};
use wpi_core::substrate::Substrate;
use wpi_core::Issue;

use crate::error::{CliError, Result};
use crate::telemetry::{self, TelemetrySummary};

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_DELTA: f64 = 0.05;

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_steps() -> usize {
    1
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn one() -> f64 {
    1.0
}

/// Simulation settings shared by `simulate` and `check-bounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    /// Trajectories per model.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Transitions per trajectory.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub estimator: EstimatorKind,
    /// Algorithmic yield of the coupled agent.
    #[serde(default = "one")]
    pub alpha: f64,
    /// Seconds per transition for the coupled agent.
    #[serde(default = "one")]
    pub tau: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            samples: DEFAULT_SAMPLES,
            steps: 1,
            delta: DEFAULT_DELTA,
            estimator: EstimatorKind::default(),
            alpha: 1.0,
            tau: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub name: String,
    pub tasks: Vec<TaskRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub substrate: String,
    pub suite: String,
    pub irreversible_ops: u64,
    /// Seconds; defaults to the telemetry span when telemetry is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    /// Joules.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_energy: Option<f64>,
    /// Telemetry CSV, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub telemetry: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratedKernel {
    /// `P(y|x) ∝ 2^(-K(y|x))` over the listed states.
    Algorithmic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Matrix(Vec<Vec<f64>>),
    Generated(GeneratedKernel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub name: String,
    pub states: Vec<CoarseState>,
    pub kernel: KernelSpec,
    /// Used to build a generated kernel; exact-enum when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_estimator: Option<EstimatorKind>,
    /// Defaults to uniform weights `1/n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
    /// Defaults to uniform for a matrix kernel, stationary for a generated one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

/// The config file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sim: SimSettings,
    #[serde(default)]
    pub substrates: Vec<Substrate>,
    #[serde(default)]
    pub suites: Vec<SuiteEntry>,
    #[serde(default)]
    pub traces: Vec<TraceEntry>,
    #[serde(default)]
    pub models: Vec<ModelEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSuite {
    pub name: String,
    pub suite: TaskSuite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub substrate: String,
    pub suite: String,
    pub trace: ExecutionTrace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub telemetry: Option<TelemetrySummary>,
}

/// SHA-256 of an input file that feeds the results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// A fully validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub sim: SimSettings,
    pub substrates: Vec<Substrate>,
    pub suites: Vec<NamedSuite>,
    pub traces: Vec<TraceConfig>,
    pub models: Vec<MarkovModel>,
    /// Telemetry files read during ingestion.
    pub inputs: Vec<InputDigest>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub delta: Option<f64>,
    pub estimator: Option<EstimatorKind>,
}

impl Overrides {
    fn apply(&self, file: &mut ConfigFile) {
        if let Some(s) = self.seed {
            file.seed = Some(s);
        }
        if let Some(n) = self.samples {
            file.sim.samples = n;
        }
        if let Some(d) = self.delta {
            file.sim.delta = d;
        }
        if let Some(e) = self.estimator {
            file.sim.estimator = e;
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn pointer_from(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses config text without semantic validation.
pub fn parse_file(text: &str) -> Result<ConfigFile> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: std::result::Result<ConfigFile, _> = serde_path_to_error::deserialize(&mut de);
    let file = parsed.map_err(|e| {
        let inner = e.inner();
        let (line, column) = (inner.line(), inner.column());
        if inner.is_syntax() || inner.is_eof() {
            CliError::Parse(format!("parse error at line {line}, column {column}: {inner}"))
        } else {
            let mut msg = inner.to_string();
            if let Some(i) = msg.find(" at line ") {
                msg.truncate(i);
            }
            CliError::Parse(format!(
                "schema error at {} (line {line}, column {column}): {msg}",
                pointer_from(e.path())
            ))
        }
    })?;
    de.end()
        .map_err(|e| CliError::Parse(format!("parse error at line {}, column {}: {e}", e.line(), e.column())))?;
    Ok(file)
}

/// Reads, parses and validates a config file. Relative telemetry paths are
/// resolved against the file's directory.
pub fn ingest_config(path: &Path, overrides: &Overrides) -> Result<(ExperimentConfig, String)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("cannot read config {}", path.display()), e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Parse(format!("config {} is not UTF-8: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let cfg = ingest_str(text, base, overrides)?;
    Ok((cfg, sha256_hex(&bytes)))
}

pub fn ingest_str(text: &str, base: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut file = parse_file(text)?;
    overrides.apply(&mut file);
    validate(file, base)
}

fn finite_positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn check_sim(sim: &SimSettings, issues: &mut Vec<Issue>) {
    if sim.samples == 0 {
        issues.push(Issue::new("/sim/samples", "must be >= 1"));
    }
    if sim.steps == 0 {
        issues.push(Issue::new("/sim/steps", "must be >= 1"));
    }
    if !(sim.delta > 0.0 && sim.delta < 1.0) {
        issues.push(Issue::new("/sim/delta", format!("must lie in (0, 1), got {}", sim.delta)));
    }
    for (name, v) in [("alpha", sim.alpha), ("tau", sim.tau)] {
        if !finite_positive(v) {
            issues.push(Issue::new(format!("/sim/{name}"), format!("must be finite and > 0, got {v}")));
        }
    }
}

fn check_substrates(substrates: &[Substrate], issues: &mut Vec<Issue>) {
    let mut seen = HashSet::new();
    for (i, s) in substrates.iter().enumerate() {
        let at = |field: &str| format!("/substrates/{i}/{field}");
        if !seen.insert(s.name.as_str()) {
            issues.push(Issue::new(at("name"), format!("duplicate substrate `{}`", s.name)));
        }
        if !finite_positive(s.temperature) {
            issues.push(Issue::new(at("temperature"), format!("must be finite and > 0 K, got {}", s.temperature)));
        }
        if !finite_positive(s.algorithmic_yield) {
            issues.push(Issue::new(at("yield"), format!("must be finite and > 0, got {}", s.algorithmic_yield)));
        }
        let factors = [(at("overhead_mem"), s.overhead_mem), (at("overhead_ctrl"), s.overhead_ctrl)]
            .into_iter()
            .chain(
                s.extra_factors
                    .iter()
                    .enumerate()
                    .map(|(k, f)| (at(&format!("extra_factors/{k}/factor")), f.factor)),
            );
        for (path, f) in factors {
            if !(f.is_finite() && f >= 1.0) {
                issues.push(Issue::new(path, format!("sub-Landauer overhead: factor must be >= 1, got {f}")));
            }
        }
    }
}

fn check_suites(suites: &[SuiteEntry], issues: &mut Vec<Issue>) -> Vec<NamedSuite> {
    let mut names = HashSet::new();
    let mut out = Vec::new();
    for (i, entry) in suites.iter().enumerate() {
        if !names.insert(entry.name.as_str()) {
            issues.push(Issue::new(format!("/suites/{i}/name"), format!("duplicate suite `{}`", entry.name)));
        }
        let before = issues.len();
        let mut ids = HashSet::new();
        for (j, t) in entry.tasks.iter().enumerate() {
            let at = |field: &str| format!("/suites/{i}/tasks/{j}/{field}");
            if !ids.insert(t.id.as_str()) {
                issues.push(Issue::new(at("id"), format!("duplicate task id `{}`", t.id)));
            }
            if !(t.weight.is_finite() && t.weight >= 0.0) {
                issues.push(Issue::new(at("weight"), format!("task `{}`: weight must be >= 0, got {}", t.id, t.weight)));
            }
            if !(0.0..=1.0).contains(&t.performance) {
                issues.push(Issue::new(
                    at("performance"),
                    format!("task `{}`: performance must lie in [0, 1], got {}", t.id, t.performance),
                ));
            }
        }
        if issues.len() == before {
            match TaskSuite::new(entry.tasks.clone()) {
                Ok(suite) => out.push(NamedSuite {
                    name: entry.name.clone(),
                    suite,
                }),
                Err(e) => issues.push(Issue::new(format!("/suites/{i}"), e.to_string())),
            }
        }
    }
    out
}

fn check_traces(
    traces: &[TraceEntry],
    substrates: &[Substrate],
    suites: &[SuiteEntry],
    base: &Path,
    issues: &mut Vec<Issue>,
    inputs: &mut Vec<InputDigest>,
) -> Vec<TraceConfig> {
    let mut out = Vec::new();
    for (i, t) in traces.iter().enumerate() {
        let at = |field: &str| format!("/traces/{i}/{field}");
        let before = issues.len();
        if !substrates.iter().any(|s| s.name == t.substrate) {
            issues.push(Issue::new(at("substrate"), format!("unknown substrate `{}`", t.substrate)));
        }
        if !suites.iter().any(|s| s.name == t.suite) {
            issues.push(Issue::new(at("suite"), format!("unknown suite `{}`", t.suite)));
        }
        if let Some(e) = t.measured_energy {
            if !(e.is_finite() && e >= 0.0) {
                issues.push(Issue::new(at("measured_energy"), format!("must be finite and >= 0 J, got {e}")));
            }
        }
        let mut summary = None;
        if let Some(rel) = &t.telemetry {
            if t.measured_energy.is_some() {
                issues.push(Issue::new(at("telemetry"), "conflicts with measured_energy; give one or the other"));
            }
            let path = base.join(rel);
            match std::fs::read(&path) {
                Err(e) => issues.push(Issue::new(at("telemetry"), format!("cannot read {}: {e}", path.display()))),
                Ok(bytes) => {
                    inputs.push(InputDigest {
                        path: rel.display().to_string(),
                        sha256: sha256_hex(&bytes),
                    });
                    match telemetry::parse(bytes.as_slice()) {
                        Ok(samples) => summary = Some(telemetry::summarize(&samples)),
                        Err(errs) => {
                            for e in errs {
                                issues.push(Issue::new(at("telemetry"), format!("{}: {e}", rel.display())));
                            }
                        }
                    }
                }
            }
        }
        let duration = t.duration.or(summary.as_ref().map(|s| s.span));
        match duration {
            None => issues.push(Issue::new(at("duration"), "required unless telemetry is given")),
            Some(d) if !finite_positive(d) => {
                issues.push(Issue::new(at("duration"), format!("must be finite and > 0 s, got {d}")))
            }
            _ => {}
        }
        if issues.len() == before {
            let mut trace = ExecutionTrace::new(t.irreversible_ops, duration.expect("checked"));
            if let Some(e) = t.measured_energy.or(summary.as_ref().map(|s| s.energy)) {
                trace = trace.with_measured_energy(e);
            }
            out.push(TraceConfig {
                substrate: t.substrate.clone(),
                suite: t.suite.clone(),
                trace,
                telemetry: summary,
            });
        }
    }
    out
}

fn build_model(m: &ModelEntry) -> std::result::Result<MarkovModel, Vec<Issue>> {
    let n = m.states.len();
    let uniform = vec![1.0 / n.max(1) as f64; n];
    let (kernel, generated_initial) = match &m.kernel {
        KernelSpec::Matrix(k) => (k.clone(), None),
        KernelSpec::Generated(GeneratedKernel::Algorithmic) => {
            if n == 0 {
                return Err(vec![Issue::new("/states", "model needs at least one state")]);
            }
            let est = Estimator::from_kind(m.kernel_estimator.unwrap_or_default());
            match MarkovModel::algorithmic(m.name.clone(), m.states.clone(), &est) {
                Ok(g) => (g.kernel().to_vec(), Some(g.initial().to_vec())),
                Err(e) => return Err(vec![Issue::new("/kernel", e.to_string())]),
            }
        }
    };
    let raw = RawModel {
        name: m.name.clone(),
        states: m.states.clone(),
        kernel,
        measure: m.measure.clone().unwrap_or_else(|| uniform.clone()),
        initial: m.initial.clone().or(generated_initial).unwrap_or(uniform),
    };
    let issues = raw.issues();
    if issues.is_empty() {
        Ok(raw.try_into().expect("issues checked"))
    } else {
        Err(issues)
    }
}

fn check_models(models: &[ModelEntry], issues: &mut Vec<Issue>) -> Vec<MarkovModel> {
    let mut names = HashSet::new();
    let mut out = Vec::new();
    for (i, m) in models.iter().enumerate() {
        if !names.insert(m.name.as_str()) {
            issues.push(Issue::new(format!("/models/{i}/name"), format!("duplicate model `{}`", m.name)));
        }
        match build_model(m) {
            Ok(model) => out.push(model),
            Err(errs) => issues.extend(
                errs.into_iter()
                    .map(|e| Issue::new(format!("/models/{i}{}", e.path), e.message)),
            ),
        }
    }
    out
}

/// Semantic validation, collecting every problem.
pub fn validate(file: ConfigFile, base: &Path) -> Result<ExperimentConfig> {
    let mut issues = Vec::new();
    if file.seed.is_none() {
        issues.push(Issue::new("/seed", "required: every experiment needs an explicit seed"));
    }
    check_sim(&file.sim, &mut issues);
    check_substrates(&file.substrates, &mut issues);
    let suites = check_suites(&file.suites, &mut issues);
    let mut inputs = Vec::new();
    let traces = check_traces(&file.traces, &file.substrates, &file.suites, base, &mut issues, &mut inputs);
    let models = check_models(&file.models, &mut issues);
    if !issues.is_empty() {
        return Err(CliError::Validation(issues));
    }
    Ok(ExperimentConfig {
        seed: file.seed.expect("checked"),
        sim: file.sim,
        substrates: file.substrates,
        suites,
        traces,
        models,
        inputs,
    })
}

impl ExperimentConfig {
    /// The equivalent config file: explicit kernels, and telemetry replaced
    /// by the energy it integrated to.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            seed: Some(self.seed),
            sim: self.sim.clone(),
            substrates: self.substrates.clone(),
            suites: self
                .suites
                .iter()
                .map(|s| SuiteEntry {
                    name: s.name.clone(),
                    tasks: s.suite.tasks.clone(),
                })
                .collect(),
            traces: self
                .traces
                .iter()
                .map(|t| TraceEntry {
                    substrate: t.substrate.clone(),
                    suite: t.suite.clone(),
                    irreversible_ops: t.trace.irreversible_ops,
                    duration: Some(t.trace.duration),
                    measured_energy: t.trace.measured_energy,
                    telemetry: None,
                })
                .collect(),
            models: self
                .models
                .iter()
                .map(|m| ModelEntry {
                    name: m.name().to_string(),
                    states: m.states().to_vec(),
                    kernel: KernelSpec::Matrix(m.kernel().to_vec()),
                    kernel_estimator: None,
                    measure: Some(m.measure_weights().to_vec()),
                    initial: Some(m.initial().to_vec()),
                })
                .collect(),
        }
    }

    pub fn substrate(&self, name: &str) -> &Substrate {
        self.substrates.iter().find(|s| s.name == name).expect("validated reference")
    }

    pub fn suite(&self, name: &str) -> &TaskSuite {
        &self.suites.iter().find(|s| s.name == name).expect("validated reference").suite
    }

    /// Suites by name, for deterministic iteration.
    pub fn suites_by_name(&self) -> BTreeMap<&str, &TaskSuite> {
        self.suites.iter().map(|s| (s.name.as_str(), &s.suite)).collect()
    }
}
