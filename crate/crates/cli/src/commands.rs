//! Subcommand implementations over a validated config.

use std::path::PathBuf;

use wpi_core::entropy::{ComplexityEstimator, Estimator, EstimatorKind};
use wpi_core::metrics::{intelligence_score, modeled_energy, wpi_report};
use wpi_core::par::Exec;
use wpi_core::sim::{
    coupled_bound_sweep, ift_check, irreversible_changes, markov_tail_check, sample_trajectories,
    transition_counts, BoundKind, Coupling, MarkovModel, Trajectory,
};
use wpi_core::substrate::{run_comparison, total_overhead, OverheadSource, SubstrateRun};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Score,
    Compare,
    Simulate,
    CheckBounds,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Score => "score",
            Command::Compare => "compare",
            Command::Simulate => "simulate",
            Command::CheckBounds => "check-bounds",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub format: Format,
    /// Exit with the assertion code when a gated check fails.
    pub assert: bool,
    /// Worker threads; 0 uses the default pool.
    pub threads: usize,
    /// Also write every sampled transition to trajectories.tsv.
    pub record: bool,
    pub timestamp: String,
}

pub struct Outcome {
    pub bundle: ReportBundle,
    /// Text for standard output in the requested format.
    pub stdout: String,
    /// Files written to the output directory, in order.
    pub written: Vec<PathBuf>,
    pub assert_failed: bool,
}

/// Current UTC time as RFC 3339, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp_now() -> String {
    use time::format_description::well_known::Rfc3339;
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|s| time::OffsetDateTime::from_unix_timestamp(s).ok())
        .unwrap_or_else(time::OffsetDateTime::now_utc);
    t.format(&Rfc3339).expect("RFC 3339 formats any UTC time")
}

fn scores(cfg: &ExperimentConfig) -> Result<Vec<ScoreRow>> {
    cfg.suites_by_name()
        .into_iter()
        .map(|(name, suite)| {
            Ok(ScoreRow {
                suite: name.to_string(),
                tasks: suite.tasks.len(),
                total_weight: suite.total_weight(),
                intelligence: intelligence_score(suite)?.value(),
            })
        })
        .collect()
}

fn wpi_rows(cfg: &ExperimentConfig) -> Result<Vec<WpiRow>> {
    cfg.traces
        .iter()
        .map(|t| {
            let s = cfg.substrate(&t.substrate);
            let energy = modeled_energy(&t.trace, total_overhead(s), s.temperature)?;
            let intelligence = intelligence_score(cfg.suite(&t.suite))?;
            let wpi = wpi_report(&energy, intelligence, s.temperature, s.algorithmic_yield, t.trace.duration)?;
            Ok(WpiRow {
                substrate: t.substrate.clone(),
                suite: t.suite.clone(),
                overhead_source: if energy.measured {
                    OverheadSource::BackSolved
                } else {
                    s.overhead_source
                },
                energy,
                intelligence: intelligence.value(),
                wpi,
            })
        })
        .collect()
}

fn comparison(cfg: &ExperimentConfig, exec: Exec) -> Result<wpi_core::substrate::ComparisonReport> {
    let runs: Vec<SubstrateRun> = cfg
        .traces
        .iter()
        .map(|t| SubstrateRun {
            substrate: cfg.substrate(&t.substrate).clone(),
            trace: t.trace.clone(),
            suite: cfg.suite(&t.suite).clone(),
        })
        .collect();
    Ok(run_comparison(&runs, exec)?)
}

fn sample(cfg: &ExperimentConfig, model: &MarkovModel, exec: Exec) -> Result<Vec<Trajectory>> {
    Ok(sample_trajectories(model, cfg.sim.steps, cfg.sim.samples, cfg.seed, exec)?)
}

fn simulation(
    cfg: &ExperimentConfig,
    model: &MarkovModel,
    trajectories: &[Trajectory],
    estimator: &dyn ComplexityEstimator,
) -> Result<SimulationRow> {
    Ok(SimulationRow {
        model: model.name().to_string(),
        trajectories: trajectories.len(),
        steps: cfg.sim.steps,
        transition_counts: transition_counts(model, trajectories),
        ift: ift_check(model, trajectories, estimator)?,
    })
}

/// Fluctuation, tail and coupled-agent checks for one model.
///
/// Gated: the Markov tail bound and the surprisal control always; the
/// coupled-agent bounds only under exact-enum, whose fluctuation relation they
/// rest on.
pub fn model_bounds(
    cfg: &ExperimentConfig,
    model: &MarkovModel,
    trajectories: &[Trajectory],
    estimator: &dyn ComplexityEstimator,
    exec: Exec,
) -> Result<ModelBounds> {
    let delta = cfg.sim.delta;
    let ift = ift_check(model, trajectories, estimator)?;
    let deltas = irreversible_changes(model, trajectories, estimator)?;
    let markov_tail = markov_tail_check(&deltas, delta, estimator.kind())?;
    let coupling = Coupling {
        alpha: cfg.sim.alpha,
        tau: cfg.sim.tau,
    };
    let sweep = |kind| coupled_bound_sweep(model, trajectories, kind, coupling, delta, estimator, exec);
    let efficiency = sweep(BoundKind::Efficiency)?;
    let adaptivity = sweep(BoundKind::Adaptivity)?;

    let mut gates = vec![Gate {
        check: "markov-tail",
        passed: markov_tail.holds_within_allowance(),
    }];
    if let Some(s) = &ift.surprisal {
        gates.push(Gate {
            check: "ift-surprisal",
            passed: s.matches_analytic(),
        });
    }
    if estimator.kind() == EstimatorKind::ExactEnum {
        gates.push(Gate {
            check: "efficiency",
            passed: efficiency.passed,
        });
        gates.push(Gate {
            check: "adaptivity",
            passed: adaptivity.passed,
        });
    }
    Ok(ModelBounds {
        model: model.name().to_string(),
        ift,
        markov_tail,
        efficiency,
        adaptivity,
        gates,
    })
}

fn render_json_or(bundle: &ReportBundle, format: Format, tables: &[&Table]) -> String {
    match format {
        Format::Json => bundle.to_json(),
        Format::Tsv => tables.iter().map(|t| t.render()).collect::<Vec<_>>().join("\n"),
    }
}

pub fn execute(cmd: Command, cfg: &ExperimentConfig, config_sha256: &str, opts: &RunOptions) -> Result<Outcome> {
    wpi_core::par::with_threads(opts.threads, || run(cmd, cfg, config_sha256, opts))
}

fn run(cmd: Command, cfg: &ExperimentConfig, config_sha256: &str, opts: &RunOptions) -> Result<Outcome> {
    let exec = Exec::default();
    let estimator = Estimator::from_kind(cfg.sim.estimator);
    let mut bundle = ReportBundle {
        metadata: Metadata {
            tool: "wpi",
            version: env!("CARGO_PKG_VERSION"),
            command: cmd.name().to_string(),
            config_sha256: config_sha256.to_string(),
            inputs: cfg.inputs.clone(),
            seed: cfg.seed,
            samples: cfg.sim.samples,
            steps: cfg.sim.steps,
            delta: cfg.sim.delta,
            estimator: cfg.sim.estimator,
            timestamp: opts.timestamp.clone(),
        },
        units: Units::default(),
        scores: Vec::new(),
        wpi: Vec::new(),
        comparison: None,
        comparison_skipped: None,
        simulations: Vec::new(),
        bounds: Vec::new(),
    };

    if matches!(cmd, Command::Score | Command::Report) {
        bundle.scores = scores(cfg)?;
        bundle.wpi = wpi_rows(cfg)?;
    }
    match cmd {
        Command::Compare => bundle.comparison = Some(comparison(cfg, exec)?),
        Command::Report => match comparison(cfg, exec) {
            Ok(c) => bundle.comparison = Some(c),
            Err(e) => bundle.comparison_skipped = Some(e.to_string()),
        },
        _ => {}
    }

    let mut recorded = Table::new(&["model", "trajectory", "step", "from", "to", "prob"]);
    if matches!(cmd, Command::Simulate | Command::CheckBounds | Command::Report) {
        for model in &cfg.models {
            let trajectories = sample(cfg, model, exec)?;
            if cmd != Command::CheckBounds {
                bundle.simulations.push(simulation(cfg, model, &trajectories, &estimator)?);
            }
            if cmd != Command::Simulate {
                bundle.bounds.push(model_bounds(cfg, model, &trajectories, &estimator, exec)?);
            }
            if opts.record {
                trajectories_table(model.name(), &trajectories, &mut recorded);
            }
        }
    }

    let compare = bundle.comparison.as_ref().map(compare_table);
    let bounds = bounds_table(&bundle.bounds);
    let mut files: Vec<(&str, String)> = vec![(REPORT_JSON, bundle.to_json())];
    if let Some(t) = &compare {
        files.push((COMPARE_TSV, t.render()));
    }
    if !bundle.bounds.is_empty() {
        files.push((BOUNDS_TSV, bounds.render()));
    }
    if opts.record && cmd == Command::Simulate {
        files.push((TRAJECTORIES_TSV, recorded.render()));
    }
    let mut written = Vec::new();
    for (name, contents) in &files {
        write_atomic(&opts.out, name, contents)?;
        written.push(opts.out.join(name));
    }

    let scores_t = scores_table(&bundle.scores);
    let wpi_t = wpi_table(&bundle.wpi);
    let sims_t = simulations_table(&bundle.simulations);
    let stdout = match cmd {
        Command::Score => render_json_or(&bundle, opts.format, &[&scores_t, &wpi_t]),
        Command::Compare => render_json_or(&bundle, opts.format, &[compare.as_ref().expect("compare ran")]),
        Command::Simulate => render_json_or(&bundle, opts.format, &[&sims_t]),
        Command::CheckBounds => render_json_or(&bundle, opts.format, &[&bounds]),
        Command::Report => {
            let mut tables = vec![&scores_t, &wpi_t];
            if let Some(t) = &compare {
                tables.push(t);
            }
            tables.extend([&sims_t, &bounds]);
            render_json_or(&bundle, opts.format, &tables)
        }
    };
    let assert_failed = opts.assert && !bundle.all_gates_passed();
    Ok(Outcome {
        bundle,
        stdout,
        written,
        assert_failed,
    })
}
