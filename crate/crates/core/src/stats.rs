//! Order-fixed reductions used by the Monte Carlo checks.

use serde::{Deserialize, Serialize};

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation with a fixed split rule, so the result depends
/// only on the slice contents and order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl MeanSe {
    /// Returns `None` for an empty sample. Uses the unbiased variance; a single
    /// sample has zero standard error.
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = pairwise_sum(values) / n as f64;
        let std_err = if n > 1 {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_sum(&sq) / (n as f64 - 1.0) / n as f64).sqrt()
        } else {
            0.0
        };
        Some(MeanSe {
            mean,
            std_err,
            samples: n,
        })
    }
}

/// Standard error of a binomial proportion estimate `p` from `n` trials.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn mean_se_of_constant_sample() {
        let m = MeanSe::of(&[2.0; 10]).unwrap();
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std_err, 0.0);
        assert!(MeanSe::of(&[]).is_none());
    }

    #[test]
    fn mean_se_of_two_points() {
        // var = 2, se = sqrt(2 / 2) = 1
        let m = MeanSe::of(&[0.0, 2.0]).unwrap();
        assert_eq!(m.mean, 1.0);
        assert!((m.std_err - 1.0).abs() < 1e-15);
    }
}
