use serde::{Deserialize, Serialize};

use super::model::MarkovModel;
use super::sample::{Step, Trajectory};
use crate::entropy::{CoarseState, ComplexityEstimator, EstimatorKind};
use crate::error::{Error, Result};
use crate::metrics::check_positive;
use crate::par::Exec;
use crate::stats::{binomial_se, MeanSe};

/// Multiple of the standard error allowed for sampling noise.
pub const SIGMA_ALLOWANCE: f64 = 3.0;
/// Floor on the mean-vs-oracle comparison for zero-variance samples, where
/// the two differ only by summation rounding.
pub const ROUNDING_ALLOWANCE: f64 = 1e-12;

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs <= rhs`.
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: f64,
    pub delta: f64,
    pub samples: usize,
    pub estimator: EstimatorKind,
    /// Sample mean of `2^(-Δ_iK)`.
    pub empirical_ift: f64,
    /// Sampling allowance on `lhs` (3 standard errors); zero for exact checks.
    pub allowance: f64,
}

impl BoundCheckResult {
    fn new(lhs: f64, rhs: f64, delta: f64, samples: usize, estimator: EstimatorKind, empirical_ift: f64) -> Self {
        BoundCheckResult {
            lhs,
            rhs,
            holds: lhs <= rhs,
            slack: rhs - lhs,
            delta,
            samples,
            estimator,
            empirical_ift,
            allowance: 0.0,
        }
    }

    /// `lhs <= rhs + allowance`.
    pub fn holds_within_allowance(&self) -> bool {
        self.lhs <= self.rhs + self.allowance
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

/// Empirical mean of an exponentiated entropy quantity next to its exact
/// expectation under the sampled process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IftStat {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
    pub analytic: f64,
    /// `mean > 1 + 3·std_err`.
    pub exceeds_one: bool,
}

impl IftStat {
    fn new(values: &[f64], analytic: f64) -> Result<Self> {
        let m = MeanSe::of(values).ok_or_else(|| Error::invalid("trajectories", "no transitions to average"))?;
        Ok(IftStat {
            mean: m.mean,
            std_err: m.std_err,
            samples: m.samples,
            analytic,
            exceeds_one: m.mean > 1.0 + SIGMA_ALLOWANCE * m.std_err,
        })
    }

    /// `|mean - analytic| <= 3·std_err`, with a rounding floor.
    pub fn matches_analytic(&self) -> bool {
        (self.mean - self.analytic).abs() <= (SIGMA_ALLOWANCE * self.std_err).max(ROUNDING_ALLOWANCE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IftReport {
    pub estimator: EstimatorKind,
    /// `2^(-Δ_iK)` with `Δ_iK = K(y) - K(x)` from the estimator.
    pub complexity: IftStat,
    /// `2^(-σ)` with the stationary surprisal `σ`; `None` for non-ergodic chains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surprisal: Option<IftStat>,
}

fn all_steps(trajectories: &[Trajectory]) -> Vec<Step> {
    trajectories.iter().flat_map(|t| t.steps.iter().copied()).collect()
}

fn check_steps(model: &MarkovModel, steps: &[Step]) -> Result<()> {
    let n = model.len();
    match steps.iter().find(|s| s.from >= n || s.to >= n) {
        Some(s) => Err(Error::invalid(
            "trajectories",
            format!("step {} -> {} is outside a {n}-state model", s.from, s.to),
        )),
        None => Ok(()),
    }
}

/// `K(x)` for every model state.
pub fn complexity_table(model: &MarkovModel, estimator: &dyn ComplexityEstimator) -> Result<Vec<f64>> {
    model
        .states()
        .iter()
        .map(|s| Ok(estimator.complexity(s)?.bits as f64))
        .collect()
}

/// `Δ_iK = K(to) - K(from)` for every sampled transition, in trajectory order.
pub fn irreversible_changes(
    model: &MarkovModel,
    trajectories: &[Trajectory],
    estimator: &dyn ComplexityEstimator,
) -> Result<Vec<f64>> {
    let steps = all_steps(trajectories);
    check_steps(model, &steps)?;
    let k = complexity_table(model, estimator)?;
    Ok(steps.iter().map(|s| k[s.to] - k[s.from]).collect())
}

/// Exact expectation of `g(x, y)` over the transitions the sampler produces:
/// the state distribution is propagated from `initial` and the per-step
/// expectations averaged over `steps`.
pub fn analytic_expectation<G>(model: &MarkovModel, steps: usize, g: G) -> f64
where
    G: Fn(usize, usize) -> f64,
{
    let mut p = model.initial().to_vec();
    let mut total = 0.0;
    for _ in 0..steps {
        for (x, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for (y, &k) in model.kernel()[x].iter().enumerate() {
                if k > 0.0 {
                    total += px * k * g(x, y);
                }
            }
        }
        p = model.step_distribution(&p);
    }
    total / steps.max(1) as f64
}

fn steps_per_trajectory(trajectories: &[Trajectory]) -> usize {
    trajectories.first().map_or(0, |t| t.steps.len())
}

/// `2^(-σ) = P(x|y)·π_st(y) / (P(y|x)·π_st(x))`, zero when the reverse move
/// is impossible.
fn surprisal_weight(model: &MarkovModel, pi: &[f64], x: usize, y: usize) -> f64 {
    let fwd = model.prob(x, y) * pi[x];
    let rev = model.prob(y, x) * pi[y];
    rev / fwd
}

/// The surprisal control `E[2^(-σ)]`, which equals one exactly whenever every
/// allowed move can be reversed. Needs the stationary distribution, so
/// reducible chains are an error.
pub fn surprisal_control(model: &MarkovModel, trajectories: &[Trajectory]) -> Result<IftStat> {
    let pi = model.stationary()?;
    let steps = all_steps(trajectories);
    check_steps(model, &steps)?;
    let values: Vec<f64> = steps
        .iter()
        .map(|s| surprisal_weight(model, &pi, s.from, s.to))
        .collect();
    let analytic = analytic_expectation(model, steps_per_trajectory(trajectories), |x, y| {
        surprisal_weight(model, &pi, x, y)
    });
    IftStat::new(&values, analytic)
}

/// Integral fluctuation check on sampled transitions: `E[2^(-Δ_iK)]` under the
/// estimator, plus the surprisal control when the chain is ergodic.
pub fn ift_check(
    model: &MarkovModel,
    trajectories: &[Trajectory],
    estimator: &dyn ComplexityEstimator,
) -> Result<IftReport> {
    let k = complexity_table(model, estimator)?;
    let deltas = irreversible_changes(model, trajectories, estimator)?;
    let values: Vec<f64> = deltas.iter().map(|d| (-d).exp2()).collect();
    let analytic = analytic_expectation(model, steps_per_trajectory(trajectories), |x, y| {
        (k[x] - k[y]).exp2()
    });
    let surprisal = match surprisal_control(model, trajectories) {
        Ok(stat) => Some(stat),
        Err(Error::NonErgodic(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(IftReport {
        estimator: estimator.kind(),
        complexity: IftStat::new(&values, analytic)?,
        surprisal,
    })
}

/// Markov's inequality on `R = 2^(-Δ_iK)` at threshold `1/δ`:
/// `lhs = Pr{R >= 1/δ}`, `rhs = δ·E[R]`, both empirical. The allowance is
/// three binomial standard errors of `lhs`.
pub fn markov_tail_check(deltas: &[f64], delta: f64, estimator: EstimatorKind) -> Result<BoundCheckResult> {
    check_delta(delta)?;
    if deltas.is_empty() {
        return Err(Error::invalid("samples", "need at least one Δ_iK sample"));
    }
    let r: Vec<f64> = deltas.iter().map(|d| (-d).exp2()).collect();
    let threshold = 1.0 / delta;
    let tail = r.iter().filter(|&&v| v >= threshold).count();
    let n = r.len();
    let lhs = tail as f64 / n as f64;
    let mean = MeanSe::of(&r).expect("non-empty").mean;
    let mut result = BoundCheckResult::new(lhs, delta * mean, delta, n, estimator, mean);
    result.allowance = SIGMA_ALLOWANCE * binomial_se(lhs, n);
    Ok(result)
}

/// An agent's measured output over one transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub intelligence: f64,
    pub power: f64,
    /// Seconds.
    pub duration: f64,
}

/// `(1/τ)·[log2(1/p) − K] + log2(1/δ)`.
fn efficiency_rhs(prob: f64, conditional_bits: f64, tau: f64, delta: f64) -> f64 {
    (-prob.log2() - conditional_bits) / tau + (1.0 / delta).log2()
}

fn transition(model: &MarkovModel, x: &CoarseState, y: &CoarseState) -> Result<(usize, usize, f64)> {
    let (i, j) = (model.index_of(x)?, model.index_of(y)?);
    let p = model.prob(i, j);
    if p <= 0.0 {
        return Err(Error::ImpossibleTransition {
            from: x.to_string(),
            to: y.to_string(),
        });
    }
    Ok((i, j, p))
}

fn single_ift(x: &CoarseState, y: &CoarseState, estimator: &dyn ComplexityEstimator) -> Result<f64> {
    let kx = estimator.complexity(x)?.bits as f64;
    let ky = estimator.complexity(y)?.bits as f64;
    Ok((kx - ky).exp2())
}

/// Intelligence-per-power bound for a transition `x -> y`:
/// `I/P <= (1/τ)·[log2(1/P(y|x)) − K(x|y)] + log2(1/δ)`.
pub fn efficiency_bound_check(
    model: &MarkovModel,
    x: &CoarseState,
    y: &CoarseState,
    agent: &Agent,
    delta: f64,
    estimator: &dyn ComplexityEstimator,
) -> Result<BoundCheckResult> {
    check_delta(delta)?;
    check_positive("power", agent.power)?;
    check_positive("duration", agent.duration)?;
    let (_, _, p) = transition(model, x, y)?;
    let k_cond = estimator.conditional(x, y)?.bits as f64;
    let rhs = efficiency_rhs(p, k_cond, agent.duration, delta);
    let ift = single_ift(x, y, estimator)?;
    Ok(BoundCheckResult::new(
        agent.intelligence / agent.power,
        rhs,
        delta,
        1,
        estimator.kind(),
        ift,
    ))
}

/// Structural adaptation bound for `s1 -> s2`:
/// `ΔI/ΔE <= (1/τ)·[log2(1/P_s(s2|s1)) − K(s1|s2)] + log2(1/δ)`.
#[allow(clippy::too_many_arguments)]
pub fn adaptivity_bound_check(
    structural: &MarkovModel,
    s1: &CoarseState,
    s2: &CoarseState,
    delta_intelligence: f64,
    delta_energy: f64,
    tau: f64,
    delta: f64,
    estimator: &dyn ComplexityEstimator,
) -> Result<BoundCheckResult> {
    if !(delta_energy.is_finite() && delta_energy > 0.0) {
        return Err(Error::NonPositiveAdaptationEnergy(delta_energy));
    }
    check_delta(delta)?;
    check_positive("tau", tau)?;
    let (_, _, p) = transition(structural, s1, s2)?;
    let k_cond = estimator.conditional(s1, s2)?.bits as f64;
    let rhs = efficiency_rhs(p, k_cond, tau, delta);
    let ift = single_ift(s1, s2, estimator)?;
    Ok(BoundCheckResult::new(
        delta_intelligence / delta_energy,
        rhs,
        delta,
        1,
        estimator.kind(),
        ift,
    ))
}

/// Agent coupled to the chain's own Landauer accounting: a transition with
/// `Δ_iK > 0` yields intelligence `α·Δ_iK` and dissipates the floor `Δ_iK`,
/// with energy measured in units of `k_B T ln 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub alpha: f64,
    pub tau: f64,
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling { alpha: 1.0, tau: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Efficiency,
    Adaptivity,
}

/// Fraction of coupled transitions on which a bound holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldsRate {
    pub bound: BoundKind,
    pub estimator: EstimatorKind,
    pub delta: f64,
    pub transitions: usize,
    /// Transitions with `Δ_iK > 0`; the rest dissipate nothing and are skipped.
    pub evaluated: usize,
    pub holds: usize,
    pub holds_rate: f64,
    pub std_err: f64,
    /// `1 − δ − 3·std_err`.
    pub threshold: f64,
    pub passed: bool,
    #[serde(with = "crate::serde_inf")]
    pub min_slack: f64,
    pub mean_lhs: f64,
    pub mean_rhs: f64,
}

/// Evaluates the coupled agent on every sampled transition.
pub fn coupled_bound_sweep(
    model: &MarkovModel,
    trajectories: &[Trajectory],
    bound: BoundKind,
    coupling: Coupling,
    delta: f64,
    estimator: &dyn ComplexityEstimator,
    exec: Exec,
) -> Result<HoldsRate> {
    check_delta(delta)?;
    check_positive("alpha", coupling.alpha)?;
    check_positive("tau", coupling.tau)?;
    let steps = all_steps(trajectories);
    check_steps(model, &steps)?;
    let k = complexity_table(model, estimator)?;
    let states = model.states();

    let results = exec.map_slice(&steps, |s| -> Result<Option<BoundCheckResult>> {
        let d = k[s.to] - k[s.from];
        if d <= 0.0 {
            return Ok(None);
        }
        let (x, y) = (&states[s.from], &states[s.to]);
        let r = match bound {
            BoundKind::Efficiency => {
                let agent = Agent {
                    intelligence: coupling.alpha * d,
                    power: d / coupling.tau,
                    duration: coupling.tau,
                };
                efficiency_bound_check(model, x, y, &agent, delta, estimator)?
            }
            BoundKind::Adaptivity => {
                adaptivity_bound_check(model, x, y, coupling.alpha * d, d, coupling.tau, delta, estimator)?
            }
        };
        Ok(Some(r))
    });
    let evaluated: Vec<BoundCheckResult> = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let n = evaluated.len();
    let holds = evaluated.iter().filter(|r| r.holds).count();
    let holds_rate = if n == 0 { 1.0 } else { holds as f64 / n as f64 };
    let std_err = binomial_se(holds_rate, n);
    let threshold = 1.0 - delta - SIGMA_ALLOWANCE * std_err;
    let mean = |f: fn(&BoundCheckResult) -> f64| {
        let v: Vec<f64> = evaluated.iter().map(f).collect();
        MeanSe::of(&v).map_or(0.0, |m| m.mean)
    };
    Ok(HoldsRate {
        bound,
        estimator: estimator.kind(),
        delta,
        transitions: steps.len(),
        evaluated: n,
        holds,
        holds_rate,
        std_err,
        threshold,
        passed: holds_rate >= threshold,
        min_slack: evaluated.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min),
        mean_lhs: mean(|r| r.lhs),
        mean_rhs: mean(|r| r.rhs),
    })
}
