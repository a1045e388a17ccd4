//! Zero-mean bounded payoff perturbations.
//!
//! Every model draws independently of the player's own action, so the
//! perturbed payoff estimate keeps its conditional mean.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng::Substream;
use crate::error::{Error, Result};

/// Rejection attempts for the truncated Gaussian before falling back to 0.
const MAX_REJECTIONS: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Uniform on `[−bound, bound]`.
    Uniform { bound: f64 },
    /// Normal with standard deviation `bound/2`, conditioned on `[−bound, bound]`.
    TruncatedGaussian { bound: f64 },
    /// Uniform on `[−c, c]` where `c ∈ [bound/2, bound]` grows with the
    /// player's previous observed payoff. Still a bounded martingale
    /// difference, but no longer identically distributed.
    HistoryDependent { bound: f64 },
}

impl NoiseModel {
    pub fn bound(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Uniform { bound }
            | NoiseModel::TruncatedGaussian { bound }
            | NoiseModel::HistoryDependent { bound } => bound,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.bound();
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!(
                "noise bound must be finite and >= 0, got {b}"
            )));
        }
        Ok(())
    }

    /// Noise for `player` at iteration `n`; `previous` is the player's last
    /// observed payoff (only the history-dependent model reads it).
    pub fn sample(&self, stream: &mut Substream, player: usize, n: usize, previous: f64) -> f64 {
        let (p, n) = (player as u64, n as u64);
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Uniform { bound } => bound * (2.0 * stream.uniform(p, n) - 1.0),
            NoiseModel::TruncatedGaussian { bound } => {
                if bound == 0.0 {
                    return 0.0;
                }
                let normal = Normal::new(0.0, bound / 2.0).expect("positive deviation");
                let rng = stream.at(p, n);
                for _ in 0..MAX_REJECTIONS {
                    let v = normal.sample(rng);
                    if v.abs() <= bound {
                        return v;
                    }
                }
                0.0
            }
            NoiseModel::HistoryDependent { bound } => {
                let c = bound * (0.5 + 0.5 * previous.clamp(0.0, 1.0));
                c * (2.0 * stream.uniform(p, n) - 1.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::rng::NOISE;

    #[test]
    fn bounded_and_centred() {
        for model in [
            NoiseModel::Uniform { bound: 0.3 },
            NoiseModel::TruncatedGaussian { bound: 0.3 },
            NoiseModel::HistoryDependent { bound: 0.3 },
        ] {
            let mut s = Substream::new(1, 0, NOISE);
            let draws: Vec<f64> = (1..20_000)
                .map(|n| model.sample(&mut s, 0, n, 0.4))
                .collect();
            assert!(draws.iter().all(|v| v.abs() <= 0.3));
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            assert!(mean.abs() < 0.01, "{model:?} mean {mean}");
        }
    }
}
