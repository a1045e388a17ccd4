//! Nash equilibria of small games: pure profiles by deviation checks, and the
//! interior mixed equilibrium of 2×2 games by indifference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{advance, FiniteGame};
use crate::profile::MixedProfile;

/// Largest game for pure enumeration.
pub const MAX_PURE_PROFILES: usize = 10_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NashSet {
    pub pure: Vec<Vec<usize>>,
    /// Interior mixed equilibria (2×2 games only).
    pub mixed: Vec<MixedProfile>,
    /// Set when mixed equilibria were not searched for.
    pub pure_only: bool,
}

impl NashSet {
    /// Every equilibrium as a mixed profile.
    pub fn profiles(&self, game: &FiniteGame) -> Vec<MixedProfile> {
        self.pure
            .iter()
            .map(|p| MixedProfile::pure(game.action_counts(), p))
            .chain(self.mixed.iter().cloned())
            .collect()
    }
}

/// No player gains by a unilateral pure deviation.
pub fn is_pure_nash(game: &FiniteGame, profile: &[usize]) -> bool {
    deviation_gap(game, profile) >= 0.0
}

/// Every unilateral deviation strictly loses.
pub fn is_strict_nash(game: &FiniteGame, profile: &[usize]) -> bool {
    deviation_gap(game, profile) > 0.0
}

/// Smallest loss over all unilateral pure deviations (negative if some
/// deviation gains; `+∞` when nobody has an alternative).
pub fn deviation_gap(game: &FiniteGame, profile: &[usize]) -> f64 {
    let mut gap = f64::INFINITY;
    let mut dev = profile.to_vec();
    for k in 0..game.num_players() {
        let own = game.payoff(k, profile);
        for b in 0..game.action_counts()[k] {
            if b == profile[k] {
                continue;
            }
            dev[k] = b;
            gap = gap.min(own - game.payoff(k, &dev));
        }
        dev[k] = profile[k];
    }
    gap
}

/// Enumerates pure Nash equilibria and, for 2×2 games, the interior mixed one.
pub fn nash_enumerate_small(game: &FiniteGame) -> Result<NashSet> {
    if game.num_profiles() > MAX_PURE_PROFILES {
        return Err(Error::invalid(format!(
            "{} pure profiles exceed the enumeration limit {MAX_PURE_PROFILES}",
            game.num_profiles()
        )));
    }
    let mut pure = Vec::new();
    let mut profile = vec![0; game.num_players()];
    for _ in 0..game.num_profiles() {
        if is_pure_nash(game, &profile) {
            pure.push(profile.clone());
        }
        advance(&mut profile, game.action_counts());
    }
    let two_by_two = game.action_counts() == [2, 2];
    let mut mixed = Vec::new();
    if two_by_two {
        let u = |k: usize, a: usize, b: usize| game.payoff(k, &[a, b]);
        // Row mixes p on action 0 to make the column player indifferent.
        let den_p = u(1, 0, 0) - u(1, 1, 0) - u(1, 0, 1) + u(1, 1, 1);
        let den_q = u(0, 0, 0) - u(0, 0, 1) - u(0, 1, 0) + u(0, 1, 1);
        if den_p != 0.0 && den_q != 0.0 {
            let p = (u(1, 1, 1) - u(1, 1, 0)) / den_p;
            let q = (u(0, 1, 1) - u(0, 0, 1)) / den_q;
            if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
                mixed.push(MixedProfile::new(vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]));
            }
        }
    }
    Ok(NashSet {
        pure,
        mixed,
        pure_only: !two_by_two,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_pennies_mixed_only() {
        let n = nash_enumerate_small(&FiniteGame::matching_pennies()).unwrap();
        assert!(n.pure.is_empty());
        assert_eq!(n.mixed.len(), 1);
        assert_eq!(n.mixed[0].0, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn coordination_has_three() {
        let n = nash_enumerate_small(&FiniteGame::coordination()).unwrap();
        assert_eq!(n.pure, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(n.mixed.len(), 1);
        assert!(n
            .pure
            .iter()
            .all(|p| is_strict_nash(&FiniteGame::coordination(), p)));
    }

    #[test]
    fn dominant_single() {
        let n = nash_enumerate_small(&FiniteGame::dominant()).unwrap();
        assert_eq!(n.pure, vec![vec![0, 0]]);
        assert!(n.mixed.is_empty());
    }
}
