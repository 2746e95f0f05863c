use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::MarkovModel;
use crate::error::{Error, Result};
use crate::par::Exec;

/// One transition: state indices into the model and the kernel entry used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub from: usize,
    pub to: usize,
    pub prob: f64,
}

/// The RNG substream that produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub seed: SeedRecord,
}

impl Trajectory {
    pub fn is_chained(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].to == w[1].from)
    }
}

/// ChaCha8 keyed by `seed` on stream `index`: trajectory `index` always sees
/// the same random numbers no matter how the work is split across threads.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Inverse-CDF draw restricted to positive entries, so a zero-probability
/// index is never returned.
fn categorical(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

pub fn sample_trajectory(model: &MarkovModel, steps: usize, seed: u64, index: u64) -> Trajectory {
    let mut rng = substream(seed, index);
    let mut x = categorical(model.initial(), rng.random::<f64>());
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let y = categorical(&model.kernel()[x], rng.random::<f64>());
        out.push(Step {
            from: x,
            to: y,
            prob: model.prob(x, y),
        });
        x = y;
    }
    Trajectory {
        steps: out,
        seed: SeedRecord { seed, stream: index },
    }
}

/// `count` independent trajectories of `steps` transitions each.
pub fn sample_trajectories(
    model: &MarkovModel,
    steps: usize,
    count: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<Trajectory>> {
    if steps == 0 {
        return Err(Error::invalid("steps", "must be >= 1"));
    }
    if count == 0 {
        return Err(Error::invalid("count", "must be >= 1"));
    }
    Ok(exec.map_range(count, |i| sample_trajectory(model, steps, seed, i as u64)))
}

/// Transition counts `counts[from][to]` over all trajectories.
pub fn transition_counts(model: &MarkovModel, trajectories: &[Trajectory]) -> Vec<Vec<u64>> {
    let n = model.len();
    let mut counts = vec![vec![0u64; n]; n];
    for s in trajectories.iter().flat_map(|t| &t.steps) {
        counts[s.from][s.to] += 1;
    }
    counts
}
