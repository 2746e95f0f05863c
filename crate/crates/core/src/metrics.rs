//! Intelligence scores, Landauer energy accounting and watts-per-intelligence.
//!
//! Units: intelligence is dimensionless, energy is in joules, power in watts and
//! Φ in watts per intelligence unit.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant in J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    /// Dimensionless difficulty weight, `>= 0`.
    pub weight: f64,
    /// Performance in `[0, 1]`.
    pub performance: f64,
}

impl TaskRecord {
    pub fn new(id: impl Into<String>, weight: f64, performance: f64) -> Self {
        TaskRecord {
            id: id.into(),
            weight,
            performance,
        }
    }
}

/// A finite, weighted task suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSuite {
    pub tasks: Vec<TaskRecord>,
}

impl TaskSuite {
    pub fn new(tasks: Vec<TaskRecord>) -> Result<Self> {
        let suite = TaskSuite { tasks };
        suite.validate()?;
        Ok(suite)
    }

    pub fn validate(&self) -> Result<()> {
        self.issues().into_iter().next().map_or(Ok(()), Err)
    }

    /// All invariant violations, in task order.
    pub fn issues(&self) -> Vec<Error> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for t in &self.tasks {
            if !seen.insert(t.id.as_str()) {
                out.push(Error::DuplicateTask(t.id.clone()));
            }
            if !(t.weight.is_finite() && t.weight >= 0.0) {
                out.push(Error::InvalidTask {
                    task: t.id.clone(),
                    reason: format!("weight must be finite and >= 0, got {}", t.weight),
                });
            }
            if !(0.0..=1.0).contains(&t.performance) {
                out.push(Error::InvalidTask {
                    task: t.id.clone(),
                    reason: format!("performance must lie in [0, 1], got {}", t.performance),
                });
            }
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.tasks.iter().map(|t| t.weight).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntelligenceScore(pub f64);

impl IntelligenceScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Weighted task score `Σ w_i P_i`, summed in ascending task-id order so the
/// result is bit-identical under any permutation of the suite.
pub fn intelligence_score(suite: &TaskSuite) -> Result<IntelligenceScore> {
    suite.validate()?;
    let mut tasks: Vec<&TaskRecord> = suite.tasks.iter().collect();
    tasks.sort_by(|a, b| a.id.cmp(&b.id));
    let value = tasks
        .iter()
        .fold(0.0, |acc, t| acc + t.weight * t.performance);
    Ok(IntelligenceScore(value))
}

/// Landauer cost `k_B T ln 2` of erasing one bit at `temperature` kelvin.
pub fn landauer_constant(temperature: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    Ok(BOLTZMANN * temperature * std::f64::consts::LN_2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    /// Irreversible bit operations performed.
    pub irreversible_ops: u64,
    /// Seconds, `> 0`.
    pub duration: f64,
    /// Joules, when a measurement is available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_energy: Option<f64>,
}

impl ExecutionTrace {
    pub fn new(irreversible_ops: u64, duration: f64) -> Self {
        ExecutionTrace {
            irreversible_ops,
            duration,
            measured_energy: None,
        }
    }

    pub fn with_measured_energy(mut self, joules: f64) -> Self {
        self.measured_energy = Some(joules);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("duration", self.duration)?;
        if let Some(e) = self.measured_energy {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::invalid(
                    "measured_energy",
                    format!("must be finite and >= 0, got {e}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyFlag {
    /// Measured energy lies below `c·N`.
    SubLandauerMeasurement,
    /// Energy was measured but no irreversible work was declared.
    ZeroOpsWithEnergy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub power: f64,
    pub landauer_floor: f64,
    #[serde(with = "crate::serde_inf")]
    pub overhead_factor_used: f64,
    pub measured: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<EnergyFlag>,
}

/// Energy and power for a trace. Modeled energy is `F·N·c`; a measured energy
/// replaces it and `F` is back-solved as `measured / (N·c)`.
pub fn modeled_energy(trace: &ExecutionTrace, overhead: f64, temperature: f64) -> Result<EnergyReport> {
    if !overhead.is_finite() || overhead < 1.0 {
        return Err(Error::SubLandauerOverhead(overhead));
    }
    trace.validate()?;
    let c = landauer_constant(temperature)?;
    let n = trace.irreversible_ops as f64;
    let landauer_floor = n * c;
    let mut flags = Vec::new();

    let (energy, overhead_factor_used) = match trace.measured_energy {
        None => (overhead * n * c, overhead),
        Some(measured) => {
            let f = if trace.irreversible_ops == 0 {
                if measured > 0.0 {
                    flags.push(EnergyFlag::ZeroOpsWithEnergy);
                    f64::INFINITY
                } else {
                    overhead
                }
            } else {
                if measured < landauer_floor {
                    flags.push(EnergyFlag::SubLandauerMeasurement);
                }
                measured / landauer_floor
            };
            (measured, f)
        }
    };

    Ok(EnergyReport {
        energy,
        power: energy / trace.duration,
        landauer_floor,
        overhead_factor_used,
        measured: trace.measured_energy.is_some(),
        flags,
    })
}

/// Watts per intelligence, `P / I`.
pub fn wpi(power: f64, intelligence: IntelligenceScore) -> Result<f64> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::invalid("power", format!("must be finite and >= 0, got {power}")));
    }
    if intelligence.0 == 0.0 {
        return Err(Error::ZeroIntelligence);
    }
    if !(intelligence.0.is_finite() && intelligence.0 > 0.0) {
        return Err(Error::invalid(
            "intelligence",
            format!("must be finite and > 0, got {}", intelligence.0),
        ));
    }
    Ok(power / intelligence.0)
}

/// Thermodynamic floor on Φ: `c·F / (α·τ)`.
pub fn phi_lower_bound(temperature: f64, overhead: f64, algorithmic_yield: f64, duration: f64) -> Result<f64> {
    if !overhead.is_finite() || overhead < 1.0 {
        return Err(Error::SubLandauerOverhead(overhead));
    }
    check_positive("yield", algorithmic_yield)?;
    check_positive("duration", duration)?;
    Ok(landauer_constant(temperature)? * overhead / (algorithmic_yield * duration))
}

/// Φ floor of a fully reversible substrate, `c / (α·τ)`.
pub fn reversible_floor(temperature: f64, algorithmic_yield: f64, duration: f64) -> Result<f64> {
    check_positive("yield", algorithmic_yield)?;
    check_positive("duration", duration)?;
    Ok(landauer_constant(temperature)? / (algorithmic_yield * duration))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpiReport {
    pub phi: f64,
    #[serde(with = "crate::serde_inf")]
    pub lower_bound: f64,
    #[serde(with = "crate::serde_inf")]
    pub slack: f64,
    pub reversible_floor: f64,
}

/// Φ together with its floors for an energy report produced at `temperature`.
///
/// The lower bound uses the overhead actually in effect, which is back-solved
/// when the energy was measured. A sub-Landauer measurement therefore yields a
/// slack below one instead of an error; the energy report carries the flag.
pub fn wpi_report(
    energy: &EnergyReport,
    intelligence: IntelligenceScore,
    temperature: f64,
    algorithmic_yield: f64,
    duration: f64,
) -> Result<WpiReport> {
    let phi = wpi(energy.power, intelligence)?;
    let reversible_floor = reversible_floor(temperature, algorithmic_yield, duration)?;
    let lower_bound =
        landauer_constant(temperature)? * energy.overhead_factor_used / (algorithmic_yield * duration);
    Ok(WpiReport {
        phi,
        lower_bound,
        slack: phi / lower_bound,
        reversible_floor,
    })
}

pub(crate) fn check_positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn score_examples() {
        let s = TaskSuite::new(vec![TaskRecord::new("a", 1.0, 1.0)]).unwrap();
        assert_eq!(intelligence_score(&s).unwrap().value(), 1.0);
        let s = TaskSuite::new(vec![
            TaskRecord::new("a", 2.0, 0.5),
            TaskRecord::new("b", 3.0, 0.0),
        ])
        .unwrap();
        assert_eq!(intelligence_score(&s).unwrap().value(), 1.0);
    }

    #[test]
    fn score_rejects_bad_tasks_by_id() {
        let s = TaskSuite {
            tasks: vec![TaskRecord::new("ok", 1.0, 0.5), TaskRecord::new("neg", -1.0, 0.5)],
        };
        match intelligence_score(&s) {
            Err(Error::InvalidTask { task, .. }) => assert_eq!(task, "neg"),
            other => panic!("unexpected {other:?}"),
        }
        let s = TaskSuite {
            tasks: vec![TaskRecord::new("hi", 1.0, 1.5)],
        };
        assert!(matches!(intelligence_score(&s), Err(Error::InvalidTask { task, .. }) if task == "hi"));
        let s = TaskSuite {
            tasks: vec![TaskRecord::new("x", 1.0, 0.5), TaskRecord::new("x", 1.0, 0.5)],
        };
        assert_eq!(s.validate(), Err(Error::DuplicateTask("x".into())));
    }

    #[test]
    fn landauer_examples() {
        let c = landauer_constant(300.0).unwrap();
        assert!(rel(c, 2.8711e-21) < 1e-4);
        assert_eq!(c, 1.380649e-23 * 300.0 * std::f64::consts::LN_2);
        assert_eq!(landauer_constant(0.5).unwrap() * 2.0, landauer_constant(1.0).unwrap());
        let t = 1.0 / std::f64::consts::LN_2 / BOLTZMANN;
        assert!(rel(landauer_constant(t).unwrap(), 1.0) < 1e-15);
        assert!(landauer_constant(0.0).is_err());
        assert!(landauer_constant(-3.0).is_err());
    }

    #[test]
    fn energy_examples() {
        let r = modeled_energy(&ExecutionTrace::new(1000, 1.0), 1.0, 300.0).unwrap();
        assert!(rel(r.energy, 2.8711e-18) < 1e-4);
        assert_eq!(r.power, r.energy);
        assert_eq!(r.landauer_floor, r.energy);

        let r = modeled_energy(&ExecutionTrace::new(0, 2.0), 3.0, 300.0).unwrap();
        assert_eq!((r.energy, r.power), (0.0, 0.0));

        let r = modeled_energy(&ExecutionTrace::new(10, 1.0).with_measured_energy(1e-18), 1.0, 300.0).unwrap();
        assert_eq!(r.energy, 1e-18);
        let c = landauer_constant(300.0).unwrap();
        assert_eq!(r.overhead_factor_used, 1e-18 / (10.0 * c));
        assert!((r.overhead_factor_used - 34.83).abs() < 0.01);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn energy_edge_cases() {
        assert_eq!(
            modeled_energy(&ExecutionTrace::new(1, 1.0), 0.5, 300.0),
            Err(Error::SubLandauerOverhead(0.5))
        );
        let r = modeled_energy(&ExecutionTrace::new(0, 1.0).with_measured_energy(1.0), 1.0, 300.0).unwrap();
        assert!(r.overhead_factor_used.is_infinite());
        assert_eq!(r.flags, vec![EnergyFlag::ZeroOpsWithEnergy]);
        let r = modeled_energy(&ExecutionTrace::new(1000, 1.0).with_measured_energy(1e-30), 1.0, 300.0).unwrap();
        assert_eq!(r.flags, vec![EnergyFlag::SubLandauerMeasurement]);
        assert!(modeled_energy(&ExecutionTrace::new(1, 0.0), 1.0, 300.0).is_err());
    }

    #[test]
    fn wpi_examples() {
        assert_eq!(wpi(10.0, IntelligenceScore(5.0)).unwrap(), 2.0);
        assert_eq!(wpi(0.0, IntelligenceScore(1.0)).unwrap(), 0.0);
        assert_eq!(wpi(1.0, IntelligenceScore(0.0)), Err(Error::ZeroIntelligence));
        let r = modeled_energy(&ExecutionTrace::new(1000, 1.0), 1.0, 300.0).unwrap();
        let phi = wpi(r.power, IntelligenceScore(1.0)).unwrap();
        assert!(rel(phi, 2.8711e-18) < 1e-4);
    }

    #[test]
    fn bound_examples() {
        let b = phi_lower_bound(300.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(b, landauer_constant(300.0).unwrap());
        let b2 = phi_lower_bound(300.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(b2, 2.0 * b);
        let b3 = phi_lower_bound(300.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(b3, b / 2.0);
        assert!(phi_lower_bound(300.0, 1.0, 0.0, 1.0).is_err());
        assert!(phi_lower_bound(300.0, 1.0, 1.0, -1.0).is_err());
        assert!(phi_lower_bound(300.0, 0.9, 1.0, 1.0).is_err());
    }

    #[test]
    fn equality_case_has_unit_slack() {
        let (t, f, alpha, tau, n) = (310.0, 7.25, 0.3, 2.5, 123_456u64);
        let e = modeled_energy(&ExecutionTrace::new(n, tau), f, t).unwrap();
        let i = IntelligenceScore(alpha * n as f64);
        let rep = wpi_report(&e, i, t, alpha, tau).unwrap();
        assert!((rep.slack - 1.0).abs() < 1e-12);
        assert!(rep.lower_bound >= rep.reversible_floor);
    }
}
