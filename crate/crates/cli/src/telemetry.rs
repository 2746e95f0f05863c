//! Power telemetry: CSV with header `t_s,power_w`, one sample per row,
//! timestamps in seconds (non-decreasing), power in watts (>= 0).

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wpi_core::stats::pairwise_sum;

pub const HEADER: [&str; 2] = ["t_s", "power_w"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_s: f64,
    pub power_w: f64,
}

/// What a telemetry file contributes to a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySummary {
    pub rows: usize,
    /// Seconds from first to last sample.
    pub span: f64,
    /// Trapezoidal energy in joules.
    pub energy: f64,
}

/// Trapezoidal integral of power over time, in joules.
pub fn integrate(samples: &[Sample]) -> f64 {
    let areas: Vec<f64> = samples
        .windows(2)
        .map(|w| 0.5 * (w[0].power_w + w[1].power_w) * (w[1].t_s - w[0].t_s))
        .collect();
    pairwise_sum(&areas)
}

/// Parses telemetry, reporting every bad row as `line N: ...`.
pub fn parse<R: Read>(reader: R) -> Result<Vec<Sample>, Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| vec![format!("cannot read header: {e}")])?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(vec![format!(
            "line 1: expected header `{}`, got `{}`",
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )]);
    }

    let mut samples = Vec::new();
    let mut errors = Vec::new();
    let mut last_t: Option<f64> = None;
    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, String> {
            let raw = record.get(i).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(format!("line {line}: {name} `{raw}` is not a finite number")),
            }
        };
        let (t, p) = match (field(0, "t_s"), field(1, "power_w")) {
            (Ok(t), Ok(p)) => (t, p),
            (a, b) => {
                errors.extend(a.err());
                errors.extend(b.err());
                continue;
            }
        };
        if p < 0.0 {
            errors.push(format!("line {line}: negative power {p} W"));
        }
        if let Some(prev) = last_t {
            if t < prev {
                errors.push(format!("line {line}: timestamp {t} s precedes previous {prev} s"));
            }
        }
        last_t = Some(t);
        samples.push(Sample { t_s: t, power_w: p });
    }
    if errors.is_empty() && samples.len() < 2 {
        errors.push(format!("need at least 2 samples, got {}", samples.len()));
    }
    if errors.is_empty() {
        Ok(samples)
    } else {
        Err(errors)
    }
}

pub fn summarize(samples: &[Sample]) -> TelemetrySummary {
    TelemetrySummary {
        rows: samples.len(),
        span: samples.last().map_or(0.0, |s| s.t_s) - samples.first().map_or(0.0, |s| s.t_s),
        energy: integrate(samples),
    }
}

/// Reads and integrates a telemetry file.
pub fn ingest(path: &Path) -> Result<TelemetrySummary, Vec<String>> {
    let file = std::fs::File::open(path).map_err(|e| vec![format!("cannot open {}: {e}", path.display())])?;
    parse(file).map(|s| summarize(&s))
}
