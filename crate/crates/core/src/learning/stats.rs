//! Convergence summaries over replicate runs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{Substream, BOOTSTRAP};
use super::run::LearnerRun;
use crate::equilibria::QrePoint;
use crate::error::{Error, Result};
use crate::profile::MixedProfile;

/// Default side of the density grid.
pub const DENSITY_GRID: usize = 50;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub epsilon: f64,
    pub runs: usize,
    /// Iterations recorded by every run.
    pub checkpoints: Vec<usize>,
    /// Fraction of runs within `ε` of some reference at each checkpoint.
    pub fractions: Vec<f64>,
    /// `converged[c][r]`: run `r` is within `ε` at checkpoint `c`.
    #[serde(skip)]
    pub converged: Vec<Vec<bool>>,
}

/// `∞`-distance from `x` to the nearest reference point.
pub fn distance_to_set(x: &MixedProfile, refs: &[QrePoint]) -> f64 {
    refs.iter()
        .map(|r| x.dist_inf(&r.x))
        .fold(f64::INFINITY, f64::min)
}

/// Fraction of runs within `epsilon` (∞-norm) of any reference QRE at each
/// iteration that every run recorded.
pub fn convergence_stats(
    runs: &[LearnerRun],
    refs: &[QrePoint],
    epsilon: f64,
) -> Result<ConvergenceSummary> {
    if runs.is_empty() || refs.is_empty() {
        return Err(Error::invalid(
            "convergence statistics need runs and reference points",
        ));
    }
    let mut checkpoints: Vec<usize> = runs[0].records.iter().map(|r| r.n).collect();
    checkpoints.retain(|n| runs.iter().all(|run| run.profile_at(*n).is_some()));
    let converged: Vec<Vec<bool>> = checkpoints
        .iter()
        .map(|&n| {
            runs.iter()
                .map(|run| distance_to_set(run.profile_at(n).unwrap(), refs) <= epsilon)
                .collect()
        })
        .collect();
    let fractions = converged
        .iter()
        .map(|c| c.iter().filter(|b| **b).count() as f64 / runs.len() as f64)
        .collect();
    Ok(ConvergenceSummary {
        epsilon,
        runs: runs.len(),
        checkpoints,
        fractions,
        converged,
    })
}

/// Counts of `(x₁, x₂)` = (player 0's, player 1's probability of action 0)
/// on a `grid × grid` partition of the unit square; `counts[i][j]` covers
/// `x₁ ∈ [i/G, (i+1)/G)` and `x₂ ∈ [j/G, (j+1)/G)`, the last cell closed.
pub fn density_grid(runs: &[LearnerRun], n: usize, grid: usize) -> Result<Vec<Vec<usize>>> {
    if grid == 0 {
        return Err(Error::invalid("density grid needs at least one cell"));
    }
    let mut counts = vec![vec![0usize; grid]; grid];
    let cell = |v: f64| ((v * grid as f64) as usize).min(grid - 1);
    for run in runs {
        let x = run
            .profile_at(n)
            .ok_or_else(|| Error::invalid(format!("iteration {n} was not recorded")))?;
        if x.num_players() != 2 || x.player(0).len() != 2 || x.player(1).len() != 2 {
            return Err(Error::Precondition("density grids need a 2×2 game".into()));
        }
        counts[cell(x.player(0)[0])][cell(x.player(1)[0])] += 1;
    }
    Ok(counts)
}

/// Paired bootstrap test of monotonicity between consecutive checkpoints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub confidence: f64,
    pub resamples: usize,
    /// Upper one-sided confidence bound of `f_{c+1} − f_c` for each consecutive pair.
    pub upper_bounds: Vec<f64>,
    /// No pair decreases significantly.
    pub monotone: bool,
}

/// Resamples runs with replacement; a pair of checkpoints counts as a
/// violation only if the upper `confidence` bound of the increase is negative.
pub fn bootstrap_monotone(
    summary: &ConvergenceSummary,
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> Result<MonotonicityReport> {
    if resamples == 0 || !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(
            "bootstrap needs resamples > 0 and confidence in (0, 1)",
        ));
    }
    let r = summary.runs;
    let pairs = summary.checkpoints.len().saturating_sub(1);
    let mut diffs = vec![Vec::with_capacity(resamples); pairs];
    let mut stream = Substream::new(seed, 0, BOOTSTRAP);
    let mut idx = vec![0usize; r];
    for b in 0..resamples {
        // A resample can need more draws than one iteration block holds,
        // so each gets its own stream.
        let rng = stream.at(b as u64, 0);
        for i in idx.iter_mut() {
            *i = rng.random_range(0..r);
        }
        for (c, d) in diffs.iter_mut().enumerate() {
            let a = idx.iter().filter(|&&i| summary.converged[c][i]).count();
            let z = idx.iter().filter(|&&i| summary.converged[c + 1][i]).count();
            d.push((z as f64 - a as f64) / r as f64);
        }
    }
    let upper_bounds: Vec<f64> = diffs
        .into_iter()
        .map(|mut d| {
            d.sort_by(f64::total_cmp);
            let i = ((confidence * resamples as f64).ceil() as usize).clamp(1, resamples) - 1;
            d[i]
        })
        .collect();
    Ok(MonotonicityReport {
        confidence,
        resamples,
        monotone: upper_bounds.iter().all(|u| *u >= 0.0),
        upper_bounds,
    })
}
