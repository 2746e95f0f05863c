use serde::{Deserialize, Serialize};

use crate::entropy::{CoarseState, ComplexityEstimator, StateMeasure};
use crate::error::{Error, Issue, Result};

/// Row-sum and normalization tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// L1 residual at which power iteration stops.
pub const STATIONARY_RESIDUAL: f64 = 1e-12;
const STATIONARY_MAX_ITERATIONS: usize = 10_000_000;

/// A discrete-time Markov chain over coarse-grained states.
///
/// `kernel[from][to]` is `P(to | from)`. `measure[i]` is the coarse-graining
/// weight `π(states[i])`, and `initial` is the distribution of the first state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct MarkovModel {
    name: String,
    states: Vec<CoarseState>,
    kernel: Vec<Vec<f64>>,
    measure: Vec<f64>,
    initial: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawModel {
    #[serde(default)]
    pub name: String,
    pub states: Vec<CoarseState>,
    pub kernel: Vec<Vec<f64>>,
    pub measure: Vec<f64>,
    pub initial: Vec<f64>,
}

impl RawModel {
    /// Every invariant violation, with paths relative to the model object.
    pub fn issues(&self) -> Vec<Issue> {
        let mut out = Vec::new();
        let n = self.states.len();
        if n == 0 {
            out.push(Issue::new("/states", "model needs at least one state"));
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                out.push(Issue::new(format!("/states/{i}"), format!("duplicate state `{s}`")));
            }
        }
        if self.kernel.len() != n {
            out.push(Issue::new(
                "/kernel",
                format!("expected {n} rows, got {}", self.kernel.len()),
            ));
        }
        for (r, row) in self.kernel.iter().enumerate() {
            if row.len() != n {
                out.push(Issue::new(
                    format!("/kernel/{r}"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
                continue;
            }
            for (c, &p) in row.iter().enumerate() {
                if !(p.is_finite() && p >= 0.0) {
                    out.push(Issue::new(
                        format!("/kernel/{r}/{c}"),
                        format!("probability must be finite and >= 0, got {p}"),
                    ));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                out.push(Issue::new(format!("/kernel/{r}"), format!("row sums to {sum}, expected 1")));
            }
        }
        if self.measure.len() != n {
            out.push(Issue::new(
                "/measure",
                format!("expected {n} weights, got {}", self.measure.len()),
            ));
        }
        for (i, &w) in self.measure.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                out.push(Issue::new(format!("/measure/{i}"), format!("weight must be finite and > 0, got {w}")));
            }
        }
        if self.initial.len() != n {
            out.push(Issue::new(
                "/initial",
                format!("expected {n} probabilities, got {}", self.initial.len()),
            ));
        }
        for (i, &p) in self.initial.iter().enumerate() {
            if !(p.is_finite() && p >= 0.0) {
                out.push(Issue::new(format!("/initial/{i}"), format!("probability must be finite and >= 0, got {p}")));
            }
        }
        let sum: f64 = self.initial.iter().sum();
        if !self.initial.is_empty() && (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            out.push(Issue::new("/initial", format!("sums to {sum}, expected 1")));
        }
        out
    }
}

impl TryFrom<RawModel> for MarkovModel {
    type Error = Error;
    fn try_from(raw: RawModel) -> Result<Self> {
        let issues = raw.issues();
        if !issues.is_empty() {
            return Err(Error::InvalidModel(issues));
        }
        Ok(MarkovModel {
            name: raw.name,
            states: raw.states,
            kernel: raw.kernel,
            measure: raw.measure,
            initial: raw.initial,
        })
    }
}

impl From<MarkovModel> for RawModel {
    fn from(m: MarkovModel) -> Self {
        RawModel {
            name: m.name,
            states: m.states,
            kernel: m.kernel,
            measure: m.measure,
            initial: m.initial,
        }
    }
}

impl MarkovModel {
    pub fn new(
        name: impl Into<String>,
        states: Vec<CoarseState>,
        kernel: Vec<Vec<f64>>,
        measure: Vec<f64>,
        initial: Vec<f64>,
    ) -> Result<Self> {
        RawModel {
            name: name.into(),
            states,
            kernel,
            measure,
            initial,
        }
        .try_into()
    }

    /// Chain with uniform measure and uniform initial distribution.
    pub fn with_uniform(name: impl Into<String>, states: Vec<CoarseState>, kernel: Vec<Vec<f64>>) -> Result<Self> {
        let n = states.len().max(1);
        let u = vec![1.0 / n as f64; states.len()];
        Self::new(name, states, kernel, u.clone(), u)
    }

    /// Chain whose kernel favors simple transformations:
    /// `P(y | x) ∝ 2^(-K(y | x))` over the listed states. Uniform measure;
    /// the initial distribution is the stationary one.
    pub fn algorithmic(
        name: impl Into<String>,
        states: Vec<CoarseState>,
        estimator: &dyn ComplexityEstimator,
    ) -> Result<Self> {
        let mut kernel = Vec::with_capacity(states.len());
        for x in &states {
            let weights = states
                .iter()
                .map(|y| Ok((-(estimator.conditional(y, x)?.bits as f64)).exp2()))
                .collect::<Result<Vec<f64>>>()?;
            let z: f64 = weights.iter().sum();
            kernel.push(weights.into_iter().map(|w| w / z).collect());
        }
        let mut model = Self::with_uniform(name, states, kernel)?;
        model.initial = model.stationary()?;
        let sum: f64 = model.initial.iter().sum();
        model.initial.iter_mut().for_each(|p| *p /= sum);
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[CoarseState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.kernel[from][to]
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn measure_weights(&self) -> &[f64] {
        &self.measure
    }

    pub fn measure(&self) -> StateMeasure {
        StateMeasure::new(self.states.iter().cloned().zip(self.measure.iter().copied()))
            .expect("validated on construction")
    }

    pub fn index_of(&self, x: &CoarseState) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == x)
            .ok_or_else(|| Error::NotInDomain(x.to_string()))
    }

    /// True when every state reaches every other through positive-probability moves.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for (v, seen_v) in seen.iter_mut().enumerate() {
                    let p = if forward { self.kernel[u][v] } else { self.kernel[v][u] };
                    if p > 0.0 && !*seen_v {
                        *seen_v = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        n > 0 && reach(true) && reach(false)
    }

    /// Stationary distribution by power iteration on the lazy chain
    /// `(P + I) / 2`, which shares `P`'s stationary distribution and is
    /// aperiodic. Reducible chains are rejected.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        if !self.is_irreducible() {
            return Err(Error::NonErgodic(format!("chain `{}` is reducible", self.name)));
        }
        let n = self.len();
        let mut pi = vec![1.0 / n as f64; n];
        for _ in 0..STATIONARY_MAX_ITERATIONS {
            let next = self.lazy_step(&pi);
            let residual: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            pi = next;
            if residual < STATIONARY_RESIDUAL {
                return Ok(pi);
            }
        }
        Err(Error::NonErgodic(format!(
            "power iteration on `{}` did not reach residual {STATIONARY_RESIDUAL}",
            self.name
        )))
    }

    fn lazy_step(&self, p: &[f64]) -> Vec<f64> {
        let mut next: Vec<f64> = p.iter().map(|v| 0.5 * v).collect();
        for (x, &px) in p.iter().enumerate() {
            for (y, &k) in self.kernel[x].iter().enumerate() {
                next[y] += 0.5 * px * k;
            }
        }
        next
    }

    /// Distribution after one step of the chain.
    pub fn step_distribution(&self, p: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; self.len()];
        for (x, &px) in p.iter().enumerate() {
            for (y, &k) in self.kernel[x].iter().enumerate() {
                next[y] += px * k;
            }
        }
        next
    }
}
