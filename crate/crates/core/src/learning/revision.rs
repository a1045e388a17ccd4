//! Which players revise at each step, and how stale their payoff feedback is.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::rng::{sample_index, Substream};
use crate::error::{Error, Result};

/// Row-sum tolerance for transition matrices.
const ROW_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RevisionProcess {
    /// Everyone revises every step.
    #[default]
    Synchronous,
    /// Player `k` revises independently with probability `probs[k]`.
    Bernoulli { probs: Vec<f64> },
    /// Homogeneous Markov chain over the listed revision sets.
    Markov {
        subsets: Vec<Vec<usize>>,
        transition: Vec<Vec<f64>>,
        #[serde(default)]
        initial: usize,
    },
}

impl RevisionProcess {
    /// Every player revises with probability `p`.
    pub fn bernoulli(num_players: usize, p: f64) -> Self {
        RevisionProcess::Bernoulli {
            probs: vec![p; num_players],
        }
    }

    /// Two players taking turns, with probability `eps` of the same player
    /// moving twice so that the chain is aperiodic.
    pub fn alternating(eps: f64) -> Self {
        RevisionProcess::Markov {
            subsets: vec![vec![0], vec![1]],
            transition: vec![vec![eps, 1.0 - eps], vec![1.0 - eps, eps]],
            initial: 0,
        }
    }

    pub fn is_synchronous(&self) -> bool {
        matches!(self, RevisionProcess::Synchronous)
    }

    /// Checks shapes, probabilities and ergodicity for a game with
    /// `num_players` players.
    pub fn validate(&self, num_players: usize) -> Result<()> {
        match self {
            RevisionProcess::Synchronous => Ok(()),
            RevisionProcess::Bernoulli { probs } => {
                if probs.len() != num_players {
                    return Err(Error::invalid(format!(
                        "{} revision probabilities for {num_players} players",
                        probs.len()
                    )));
                }
                if let Some(p) = probs.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
                    return Err(Error::invalid(format!(
                        "revision probabilities must lie in (0, 1], got {p}"
                    )));
                }
                Ok(())
            }
            RevisionProcess::Markov {
                subsets,
                transition,
                initial,
            } => {
                let s = subsets.len();
                if s == 0 {
                    return Err(Error::invalid("revision chain has no states"));
                }
                if *initial >= s {
                    return Err(Error::invalid("initial revision state out of range"));
                }
                if subsets.iter().flatten().any(|&k| k >= num_players) {
                    return Err(Error::invalid(
                        "revision set names a player that does not exist",
                    ));
                }
                if transition.len() != s || transition.iter().any(|r| r.len() != s) {
                    return Err(Error::invalid(
                        "transition matrix must be square over the revision sets",
                    ));
                }
                for (i, row) in transition.iter().enumerate() {
                    if row.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
                        return Err(Error::invalid(format!(
                            "row {i} has a negative or non-finite entry"
                        )));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > ROW_TOL {
                        return Err(Error::invalid(format!("row {i} sums to {sum}")));
                    }
                }
                if !is_primitive(transition) {
                    return Err(Error::Precondition(
                        "revision chain is not irreducible and aperiodic".into(),
                    ));
                }
                let eta = self.stationary_rates(num_players)?;
                if let Some(k) = eta.iter().position(|&e| e <= 0.0) {
                    return Err(Error::Precondition(format!(
                        "player {k} never revises under the stationary distribution"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Long-run revision frequency `η_k` of each player.
    pub fn stationary_rates(&self, num_players: usize) -> Result<Vec<f64>> {
        match self {
            RevisionProcess::Synchronous => Ok(vec![1.0; num_players]),
            RevisionProcess::Bernoulli { probs } => Ok(probs.clone()),
            RevisionProcess::Markov {
                subsets,
                transition,
                ..
            } => {
                let pi = stationary_distribution(transition)?;
                let mut eta = vec![0.0; num_players];
                for (set, p) in subsets.iter().zip(&pi) {
                    for &k in set {
                        eta[k] += p;
                    }
                }
                Ok(eta)
            }
        }
    }
}

/// Irreducible and aperiodic, tested by positivity of a power of the
/// support pattern (Wielandt's bound `(s−1)² + 1`).
fn is_primitive(p: &[Vec<f64>]) -> bool {
    let s = p.len();
    let adj: Vec<Vec<bool>> = p
        .iter()
        .map(|r| r.iter().map(|v| *v > 0.0).collect())
        .collect();
    let mut reach = adj.clone();
    let limit = (s - 1) * (s - 1) + 1;
    for _ in 1..limit {
        if reach.iter().flatten().all(|b| *b) {
            return true;
        }
        let mut next = vec![vec![false; s]; s];
        for i in 0..s {
            for j in 0..s {
                if reach[i][j] {
                    for l in 0..s {
                        next[i][l] |= adj[j][l];
                    }
                }
            }
        }
        reach = next;
    }
    reach.iter().flatten().all(|b| *b)
}

/// Solves `π P = π`, `Σ π = 1`.
fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let s = p.len();
    let mut a = DMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            a[(i, j)] = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    // Replace the last balance equation by the normalization.
    for j in 0..s {
        a[(s - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(s);
    b[s - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::numerical("singular stationary system", f64::NAN, vec![]))?;
    Ok(pi.iter().map(|v| v.max(0.0)).collect())
}

/// Draws revision sets step by step.
#[derive(Clone, Debug)]
pub(crate) struct RevisionSampler {
    state: usize,
}

impl RevisionSampler {
    pub fn new(process: &RevisionProcess) -> Self {
        let state = match process {
            RevisionProcess::Markov { initial, .. } => *initial,
            _ => 0,
        };
        RevisionSampler { state }
    }

    /// Fills `out[k]` with whether player `k` revises at step `n ≥ 1`.
    pub fn draw(
        &mut self,
        process: &RevisionProcess,
        stream: &mut Substream,
        n: usize,
        out: &mut [bool],
    ) {
        match process {
            RevisionProcess::Synchronous => out.fill(true),
            RevisionProcess::Bernoulli { probs } => {
                for (k, (o, p)) in out.iter_mut().zip(probs).enumerate() {
                    *o = *p >= 1.0 || stream.uniform(k as u64, n as u64) < *p;
                }
            }
            RevisionProcess::Markov {
                subsets,
                transition,
                ..
            } => {
                // The chain starts in the initial state at n = 1.
                if n > 1 {
                    let u = stream.uniform(out.len() as u64, n as u64);
                    self.state = sample_index(&transition[self.state], u);
                }
                out.fill(false);
                for &k in &subsets[self.state] {
                    out[k] = true;
                }
            }
        }
    }
}

/// Bounded payoff delays, i.i.d. uniform on `{0, …, M}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayModel {
    #[serde(rename = "M")]
    pub max_delay: usize,
}

impl DelayModel {
    pub fn none() -> Self {
        DelayModel { max_delay: 0 }
    }

    pub fn uniform(max_delay: usize) -> Self {
        DelayModel { max_delay }
    }

    /// Delay for `player` at step `n ≥ 1`, never reaching before step 1.
    pub fn sample(&self, stream: &mut Substream, player: usize, n: usize) -> usize {
        if self.max_delay == 0 {
            return 0;
        }
        let u = stream.uniform(player as u64, n as u64);
        let tau = ((u * (self.max_delay + 1) as f64) as usize).min(self.max_delay);
        tau.min(n - 1)
    }
}

/// The last `M + 1` action profiles, newest last.
#[derive(Clone, Debug)]
pub(crate) struct ProfileHistory {
    slots: Vec<Vec<usize>>,
    newest: usize,
}

impl ProfileHistory {
    pub fn new(max_delay: usize, num_players: usize) -> Self {
        ProfileHistory {
            slots: vec![vec![0; num_players]; max_delay + 1],
            newest: 0,
        }
    }

    /// Stores the profile played at step `n`.
    pub fn push(&mut self, n: usize, profile: &[usize]) {
        let i = n % self.slots.len();
        self.slots[i].copy_from_slice(profile);
        self.newest = n;
    }

    /// Profile played `tau` steps before the newest.
    pub fn back(&self, tau: usize) -> &[usize] {
        debug_assert!(tau < self.slots.len() && tau < self.newest.max(1));
        &self.slots[(self.newest - tau) % self.slots.len()]
    }
}
