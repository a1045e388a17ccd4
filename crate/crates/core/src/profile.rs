//! Mixed strategy profiles and their dual relative-score coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on per-player probability sums when validating a profile.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A point of the product of simplices: one probability vector per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedProfile(pub Vec<Vec<f64>>);

impl MixedProfile {
    pub fn new(blocks: Vec<Vec<f64>>) -> Self {
        MixedProfile(blocks)
    }

    /// The barycenter: every player mixes uniformly.
    pub fn uniform(action_counts: &[usize]) -> Self {
        MixedProfile(
            action_counts
                .iter()
                .map(|&n| vec![1.0 / n as f64; n])
                .collect(),
        )
    }

    /// The vertex where player `k` plays `actions[k]` with certainty.
    pub fn pure(action_counts: &[usize], actions: &[usize]) -> Self {
        MixedProfile(
            action_counts
                .iter()
                .zip(actions)
                .map(|(&n, &a)| {
                    let mut v = vec![0.0; n];
                    v[a] = 1.0;
                    v
                })
                .collect(),
        )
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }

    pub fn player(&self, k: usize) -> &[f64] {
        &self.0[k]
    }

    pub fn player_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.0[k]
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }

    /// Checks shape, finiteness, nonnegativity and unit sums.
    pub fn validate(&self, action_counts: &[usize]) -> Result<()> {
        if self.0.len() != action_counts.len() {
            return Err(Error::invalid(format!(
                "profile has {} players, game has {}",
                self.0.len(),
                action_counts.len()
            )));
        }
        for (k, (block, &n)) in self.0.iter().zip(action_counts).enumerate() {
            if block.len() != n {
                return Err(Error::invalid(format!(
                    "player {k}: profile has {} actions, game has {n}",
                    block.len()
                )));
            }
            if block.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::invalid(format!(
                    "player {k}: probabilities must be finite and nonnegative"
                )));
            }
            let s: f64 = block.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "player {k}: probabilities sum to {s}"
                )));
            }
        }
        Ok(())
    }

    /// True when every coordinate is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.0.iter().flatten().all(|&p| p > 0.0)
    }

    /// Smallest coordinate over all players.
    pub fn min_coordinate(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation of a per-player sum from one.
    pub fn max_sum_error(&self) -> f64 {
        self.0
            .iter()
            .map(|b| (b.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn dist_inf(&self, other: &MixedProfile) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.0.iter().flatten().copied().collect()
    }

    /// Rebuilds a profile from a flat vector laid out player by player.
    pub fn from_flat(flat: &[f64], action_counts: &[usize]) -> Self {
        let mut out = Vec::with_capacity(action_counts.len());
        let mut i = 0;
        for &n in action_counts {
            out.push(flat[i..i + n].to_vec());
            i += n;
        }
        MixedProfile(out)
    }

    /// Divides each block by its sum.
    pub fn renormalize(&mut self) {
        for block in &mut self.0 {
            let s: f64 = block.iter().sum();
            block.iter_mut().for_each(|p| *p /= s);
        }
    }
}

/// Per-player score differences `z_{kμ} = y_{kμ} - y_{k0}` against action 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelativeScores(pub Vec<Vec<f64>>);

impl RelativeScores {
    pub fn zeros(action_counts: &[usize]) -> Self {
        RelativeScores(action_counts.iter().map(|&n| vec![0.0; n - 1]).collect())
    }

    /// Projects full score vectors onto relative scores.
    pub fn from_scores(y: &[Vec<f64>]) -> Self {
        RelativeScores(
            y.iter()
                .map(|yk| yk[1..].iter().map(|v| v - yk[0]).collect())
                .collect(),
        )
    }

    pub fn player(&self, k: usize) -> &[f64] {
        &self.0[k]
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.0
    }

    /// Reduced dimensions per player (action count minus one).
    pub fn dims(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.0.iter().flatten().copied().collect()
    }

    pub fn from_flat(flat: &[f64], dims: &[usize]) -> Self {
        let mut out = Vec::with_capacity(dims.len());
        let mut i = 0;
        for &d in dims {
            out.push(flat[i..i + d].to_vec());
            i += d;
        }
        RelativeScores(out)
    }

    /// Full score vector for player `k` with the benchmark score set to zero.
    pub fn full_scores(&self, k: usize) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.0[k].len() + 1);
        y.push(0.0);
        y.extend_from_slice(&self.0[k]);
        y
    }
}

/// Infinity norm of a nested vector.
pub(crate) fn nested_norm_inf(v: &[Vec<f64>]) -> f64 {
    v.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
}
