use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wpi_core::entropy::EstimatorKind;

use crate::commands::{execute, timestamp_now, Command, Format, RunOptions};
use crate::config::{ingest_config, Overrides};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ASSERT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wpi", version, about = "Watts-per-intelligence metrics and thermodynamic bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Intelligence scores and Φ for every trace.
    Score(Common),
    /// Φ comparison of one algorithm across substrates.
    Compare(Common),
    /// Sample trajectories and report fluctuation statistics.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Write every sampled transition to trajectories.tsv.
        #[arg(long)]
        record: bool,
    },
    /// Fluctuation, tail and coupled efficiency bound checks.
    CheckBounds(Common),
    /// Everything above in one bundle.
    Report(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EstimatorArg {
    ExactEnum,
    LzProxy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Tsv,
}

#[derive(Args, Debug)]
struct Common {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Output directory for report.json and the TSV tables.
    #[arg(long, default_value = "wpi-out")]
    out: PathBuf,
    /// Standard output format.
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectories per model; overrides the config.
    #[arg(long)]
    samples: Option<usize>,
    /// Confidence parameter in (0, 1); overrides the config.
    #[arg(long)]
    delta: Option<f64>,
    /// Complexity estimator; overrides the config.
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// Exit with status 2 if a gated bound check fails.
    #[arg(long)]
    assert: bool,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let (cmd, common, record) = match cli.command {
        Sub::Score(c) => (Command::Score, c, false),
        Sub::Compare(c) => (Command::Compare, c, false),
        Sub::Simulate { common, record } => (Command::Simulate, common, record),
        Sub::CheckBounds(c) => (Command::CheckBounds, c, false),
        Sub::Report(c) => (Command::Report, c, false),
    };
    let overrides = Overrides {
        seed: common.seed,
        samples: common.samples,
        delta: common.delta,
        estimator: common.estimator.map(|e| match e {
            EstimatorArg::ExactEnum => EstimatorKind::ExactEnum,
            EstimatorArg::LzProxy => EstimatorKind::LzProxy,
        }),
    };
    let opts = RunOptions {
        out: common.out,
        format: match common.format {
            FormatArg::Json => Format::Json,
            FormatArg::Tsv => Format::Tsv,
        },
        assert: common.assert,
        threads: common.threads,
        record,
        timestamp: timestamp_now(),
    };
    let result = ingest_config(&common.config, &overrides).and_then(|(cfg, sha)| execute(cmd, &cfg, &sha, &opts));
    match result {
        Ok(outcome) => {
            let _ = write!(stdout, "{}", outcome.stdout);
            if outcome.assert_failed {
                let failed: Vec<String> = outcome
                    .bundle
                    .bounds
                    .iter()
                    .flat_map(|m| m.gates.iter().filter(|g| !g.passed).map(move |g| format!("{}:{}", m.model, g.check)))
                    .collect();
                let _ = writeln!(stderr, "assertion failed: {}", failed.join(", "));
                EXIT_ASSERT
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}
