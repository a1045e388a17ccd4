//! Finite normal-form games, expected payoffs, potentials and congestion games.
//!
//! Payoffs are stored as one dense table per player, indexed by joint pure
//! profile in row-major order (the last player's action varies fastest).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::profile::MixedProfile;

/// Default tolerance for flagging a game as potential.
pub const POTENTIAL_TOL: f64 = 1e-9;

/// A finite game in normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGame {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
    bounds: Vec<(f64, f64)>,
}

impl FiniteGame {
    /// Builds a game from per-player payoff tables in row-major profile order.
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.is_empty() {
            return Err(Error::invalid("a game needs at least one player"));
        }
        if action_counts.contains(&0) {
            return Err(Error::invalid("every player needs at least one action"));
        }
        if payoffs.len() != action_counts.len() {
            return Err(Error::invalid(format!(
                "{} payoff tables for {} players",
                payoffs.len(),
                action_counts.len()
            )));
        }
        let size: usize = action_counts.iter().product();
        for (k, table) in payoffs.iter().enumerate() {
            if table.len() != size {
                return Err(Error::invalid(format!(
                    "player {k}: payoff table has {} entries, expected {size}",
                    table.len()
                )));
            }
            if table.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("player {k}: non-finite payoff")));
            }
        }
        let mut strides = vec![1; action_counts.len()];
        for k in (0..action_counts.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * action_counts[k + 1];
        }
        let bounds = payoffs
            .iter()
            .map(|t| {
                t.iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    })
            })
            .collect();
        Ok(FiniteGame {
            action_counts,
            strides,
            payoffs,
            bounds,
        })
    }

    /// Builds a game by evaluating `f(player, joint_actions)` on every profile.
    pub fn from_fn(
        action_counts: Vec<usize>,
        mut f: impl FnMut(usize, &[usize]) -> f64,
    ) -> Result<Self> {
        let n = action_counts.len();
        let size: usize = action_counts.iter().product();
        let mut payoffs = vec![Vec::with_capacity(size); n];
        let mut profile = vec![0; n];
        for _ in 0..size {
            for (k, table) in payoffs.iter_mut().enumerate() {
                table.push(f(k, &profile));
            }
            advance(&mut profile, &action_counts);
        }
        FiniteGame::new(action_counts, payoffs)
    }

    /// Two-player game from row-player matrix `a` and column-player matrix `b`.
    pub fn bimatrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Self> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        if b.len() != rows || a.iter().chain(b).any(|r| r.len() != cols) {
            return Err(Error::invalid("bimatrix payoffs must share one shape"));
        }
        FiniteGame::from_fn(vec![rows, cols], |k, p| {
            if k == 0 {
                a[p[0]][p[1]]
            } else {
                b[p[0]][p[1]]
            }
        })
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    /// Number of joint pure profiles.
    pub fn num_profiles(&self) -> usize {
        self.payoffs[0].len()
    }

    /// Total number of actions across players.
    pub fn total_actions(&self) -> usize {
        self.action_counts.iter().sum()
    }

    /// `A₀ = Σₖ (|𝒜ₖ| − 1)`, the dimension of the state space.
    pub fn reduced_dim(&self) -> usize {
        self.total_actions() - self.num_players()
    }

    /// Payoff table of player `k`.
    pub fn table(&self, k: usize) -> &[f64] {
        &self.payoffs[k]
    }

    /// Per-player `(min, max)` payoff.
    pub fn payoff_bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn encode(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let a = index / s;
                index %= s;
                a
            })
            .collect()
    }

    /// Payoff to player `k` at a pure profile.
    pub fn payoff(&self, k: usize, profile: &[usize]) -> f64 {
        self.payoffs[k][self.encode(profile)]
    }

    fn check_profile(&self, x: &MixedProfile) -> Result<()> {
        let ok = x.num_players() == self.num_players()
            && x.blocks()
                .iter()
                .zip(&self.action_counts)
                .all(|(b, &n)| b.len() == n);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("profile shape does not match the game"))
        }
    }

    /// `u_{kα}(x)`: payoff to player `k` for action `alpha` against `x_{−k}`.
    pub fn expected_payoff(&self, x: &MixedProfile, k: usize, alpha: usize) -> Result<f64> {
        if k >= self.num_players() || alpha >= self.action_counts[k] {
            return Err(Error::invalid(format!(
                "player {k}, action {alpha} out of range"
            )));
        }
        self.check_profile(x)?;
        let mut total = 0.0;
        let mut profile = vec![0; self.num_players()];
        for idx in 0..self.num_profiles() {
            if profile[k] == alpha {
                let w: f64 = profile
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != k)
                    .map(|(l, &a)| x.player(l)[a])
                    .product();
                total += w * self.payoffs[k][idx];
            }
            advance(&mut profile, &self.action_counts);
        }
        Ok(total)
    }

    /// All payoff vectors `u_k(x)` at once.
    pub fn payoff_vectors(&self, x: &MixedProfile) -> Vec<Vec<f64>> {
        let n = self.num_players();
        let mut out: Vec<Vec<f64>> = self.action_counts.iter().map(|&m| vec![0.0; m]).collect();
        let mut profile = vec![0; n];
        let mut prefix = vec![1.0; n + 1];
        let mut suffix = vec![1.0; n + 1];
        for idx in 0..self.num_profiles() {
            for l in 0..n {
                prefix[l + 1] = prefix[l] * x.player(l)[profile[l]];
            }
            for l in (0..n).rev() {
                suffix[l] = suffix[l + 1] * x.player(l)[profile[l]];
            }
            for k in 0..n {
                let w = prefix[k] * suffix[k + 1];
                if w != 0.0 {
                    out[k][profile[k]] += w * self.payoffs[k][idx];
                }
            }
            advance(&mut profile, &self.action_counts);
        }
        out
    }

    /// Mean payoff `u_k(x) = Σ_α x_{kα} u_{kα}(x)` for every player.
    pub fn mean_payoffs(&self, x: &MixedProfile) -> Vec<f64> {
        self.payoff_vectors(x)
            .iter()
            .zip(x.blocks())
            .map(|(u, xk)| u.iter().zip(xk).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Matrix of `∂u_{kα}/∂x_{lβ}` (rows indexed by `α`, columns by `β`).
    /// Zero when `k == l` since payoffs do not depend on one's own strategy.
    pub fn cross_payoffs(&self, x: &MixedProfile, k: usize, l: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.action_counts[l]]; self.action_counts[k]];
        if k == l {
            return out;
        }
        let mut profile = vec![0; self.num_players()];
        for idx in 0..self.num_profiles() {
            let w: f64 = profile
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k && m != l)
                .map(|(m, &a)| x.player(m)[a])
                .product();
            if w != 0.0 {
                out[profile[k]][profile[l]] += w * self.payoffs[k][idx];
            }
            advance(&mut profile, &self.action_counts);
        }
        out
    }

    /// Multilinear extension of a per-profile table (for example a potential)
    /// evaluated at a mixed profile.
    pub fn multilinear(&self, table: &[f64], x: &MixedProfile) -> f64 {
        let mut profile = vec![0; self.num_players()];
        let mut total = 0.0;
        for &v in table {
            let w: f64 = profile
                .iter()
                .enumerate()
                .map(|(l, &a)| x.player(l)[a])
                .product();
            total += w * v;
            advance(&mut profile, &self.action_counts);
        }
        total
    }

    /// The sub-game where player `k` may only use the actions in `support[k]`.
    pub fn restrict(&self, support: &[Vec<usize>]) -> Result<FiniteGame> {
        if support.len() != self.num_players() {
            return Err(Error::invalid("support must list actions for every player"));
        }
        for (k, s) in support.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::invalid(format!("player {k}: empty support")));
            }
            if s.iter().any(|&a| a >= self.action_counts[k]) {
                return Err(Error::invalid(format!("player {k}: support out of range")));
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::invalid(format!(
                    "player {k}: repeated action in support"
                )));
            }
        }
        let counts = support.iter().map(Vec::len).collect();
        FiniteGame::from_fn(counts, |k, p| {
            let full: Vec<usize> = p.iter().enumerate().map(|(l, &a)| support[l][a]).collect();
            self.payoff(k, &full)
        })
    }

    /// The game with every payoff multiplied by `c`.
    pub fn scaled(&self, c: f64) -> FiniteGame {
        let payoffs = self
            .payoffs
            .iter()
            .map(|t| t.iter().map(|v| c * v).collect())
            .collect();
        FiniteGame::new(self.action_counts.clone(), payoffs).expect("scaling keeps shape")
    }

    /// Largest `|u_{kμ}(x) − u_{k0}(x)|` bound per player: the payoff span.
    pub fn payoff_spans(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| hi - lo).collect()
    }

    /// Symmetric 2×2 coordination game: both players get 1 when they match.
    pub fn coordination() -> FiniteGame {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        FiniteGame::bimatrix(&a, &a).unwrap()
    }

    /// Matching pennies: the row player wins on a match.
    pub fn matching_pennies() -> FiniteGame {
        let a = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let b = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
        FiniteGame::bimatrix(&a, &b).unwrap()
    }

    /// 2×2 game where action 0 strictly dominates action 1 for both players.
    pub fn dominant() -> FiniteGame {
        let a = vec![vec![3.0, 1.0], vec![2.0, 0.0]];
        let b = vec![vec![3.0, 2.0], vec![1.0, 0.0]];
        FiniteGame::bimatrix(&a, &b).unwrap()
    }

    /// A game with all payoffs zero.
    pub fn zero(action_counts: Vec<usize>) -> FiniteGame {
        FiniteGame::from_fn(action_counts, |_, _| 0.0).unwrap()
    }
}

/// Steps a joint profile to the next one in row-major order.
pub(crate) fn advance(profile: &mut [usize], counts: &[usize]) {
    for k in (0..profile.len()).rev() {
        profile[k] += 1;
        if profile[k] < counts[k] {
            return;
        }
        profile[k] = 0;
    }
}

/// Fitted potential on pure profiles and the worst violation of the
/// potential property over unilateral deviations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialCertificate {
    pub potential_values: Vec<f64>,
    pub residual: f64,
    /// Tolerance the residual was compared against, scaled by the payoff span.
    pub tolerance: f64,
}

impl PotentialCertificate {
    pub fn is_potential(&self) -> bool {
        self.residual <= self.tolerance
    }

    /// Potential `U(x)` extended multilinearly to mixed profiles.
    pub fn evaluate(&self, game: &FiniteGame, x: &MixedProfile) -> f64 {
        game.multilinear(&self.potential_values, x)
    }
}

/// Fits a potential by least squares over all unilateral pure deviations.
///
/// The potential is anchored at `U(first profile) = 0`. The tolerance is
/// applied to payoffs normalized to unit span, so `tol` is scale free.
pub fn fit_potential(game: &FiniteGame, tol: f64) -> PotentialCertificate {
    let size = game.num_profiles();
    let counts = game.action_counts();
    let n = game.num_players();

    // Deviation graph: edge (p, q, d) with U(q) - U(p) = d.
    let mut edges = Vec::new();
    for p in 0..size {
        let prof = game.decode(p);
        for k in 0..n {
            for b in prof[k] + 1..counts[k] {
                let mut dev = prof.clone();
                dev[k] = b;
                let q = game.encode(&dev);
                edges.push((p, q, game.table(k)[q] - game.table(k)[p]));
            }
        }
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); size];
    for &(p, q, d) in &edges {
        adj[p].push((q, d));
        adj[q].push((p, -d));
    }

    // Spanning-tree integration gives the exact potential when one exists.
    let mut u = vec![f64::NAN; size];
    u[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        for &(q, d) in &adj[p] {
            if u[q].is_nan() {
                u[q] = u[p] + d;
                queue.push_back(q);
            }
        }
    }

    let violation = |u: &[f64]| {
        edges
            .iter()
            .map(|&(p, q, d)| (u[q] - u[p] - d).abs())
            .fold(0.0, f64::max)
    };
    let span = game.payoff_spans().into_iter().fold(0.0, f64::max);
    let tolerance = tol * span.max(1.0);

    if violation(&u) > tolerance {
        least_squares_refine(&mut u, &adj);
    }
    let residual = violation(&u);
    PotentialCertificate {
        potential_values: u,
        residual,
        tolerance,
    }
}

/// Conjugate gradients on the graph Laplacian with node 0 pinned to zero.
fn least_squares_refine(u: &mut [f64], adj: &[Vec<(usize, f64)>]) {
    let size = u.len();
    let apply = |v: &[f64], out: &mut [f64]| {
        for p in 0..size {
            out[p] = if p == 0 {
                0.0
            } else {
                adj[p]
                    .iter()
                    .map(|&(q, _)| v[p] - if q == 0 { 0.0 } else { v[q] })
                    .sum()
            };
        }
    };
    // Normal equations: Σ_q (U_p − U_q) = Σ_q (−d_{p→q}).
    let rhs: Vec<f64> = (0..size)
        .map(|p| {
            if p == 0 {
                0.0
            } else {
                adj[p].iter().map(|&(_, d)| -d).sum()
            }
        })
        .collect();
    let mut ap = vec![0.0; size];
    apply(u, &mut ap);
    let mut r: Vec<f64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut d = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let scale = rhs.iter().map(|v| v * v).sum::<f64>().max(1.0);
    for _ in 0..10 * size.max(10) {
        if rr <= 1e-30 * scale {
            break;
        }
        apply(&d, &mut ap);
        let dad: f64 = d.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if dad <= 0.0 {
            break;
        }
        let alpha = rr / dad;
        for i in 0..size {
            u[i] += alpha * d[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for i in 0..size {
            d[i] = r[i] + beta * d[i];
        }
        rr = rr_new;
    }
    u[0] = 0.0;
}

/// Description of a finite congestion game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongestionSpec {
    pub resources: usize,
    /// `delays[r][j]` is the delay of resource `r` at load `j + 1`.
    pub delays: Vec<Vec<f64>>,
    /// `routes[k][a]` lists the resources used by action `a` of player `k`.
    pub routes: Vec<Vec<Vec<usize>>>,
}

impl CongestionSpec {
    fn validate(&self) -> Result<()> {
        let n = self.routes.len();
        if n == 0 {
            return Err(Error::invalid("congestion game needs at least one player"));
        }
        if self.delays.len() != self.resources {
            return Err(Error::invalid(format!(
                "{} delay lists for {} resources",
                self.delays.len(),
                self.resources
            )));
        }
        for (r, d) in self.delays.iter().enumerate() {
            if d.len() < n {
                return Err(Error::invalid(format!(
                    "resource {r}: delays cover loads up to {}, need {n}",
                    d.len()
                )));
            }
        }
        for (k, routes) in self.routes.iter().enumerate() {
            if routes.is_empty() {
                return Err(Error::invalid(format!("player {k}: no routes")));
            }
            for route in routes {
                if let Some(&r) = route.iter().find(|&&r| r >= self.resources) {
                    return Err(Error::invalid(format!(
                        "player {k}: route uses unknown resource {r}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn loads(&self, profile: &[usize]) -> Vec<usize> {
        let mut load = vec![0; self.resources];
        for (k, &a) in profile.iter().enumerate() {
            for &r in &self.routes[k][a] {
                load[r] += 1;
            }
        }
        load
    }
}

/// Builds the congestion game: each action is a route and the payoff is minus
/// the sum of resource delays at realized loads.
pub fn congestion_game(spec: &CongestionSpec) -> Result<FiniteGame> {
    spec.validate()?;
    let counts = spec.routes.iter().map(Vec::len).collect();
    FiniteGame::from_fn(counts, |k, p| {
        let load = spec.loads(p);
        -spec.routes[k][p[k]]
            .iter()
            .map(|&r| spec.delays[r][load[r] - 1])
            .sum::<f64>()
    })
}

/// Per-player affine map `u ↦ scale·u + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: f64,
    /// Set when the player's payoffs were constant and got mapped to 0.5.
    pub degenerate: bool,
}

impl AffineMap {
    pub fn apply(&self, v: f64) -> f64 {
        self.scale * v + self.offset
    }
}

/// Rescales each player's payoffs affinely onto `[0, 1]`.
pub fn normalize_payoffs(game: &FiniteGame) -> (FiniteGame, Vec<AffineMap>) {
    let maps: Vec<AffineMap> = game
        .payoff_bounds()
        .iter()
        .map(|&(lo, hi)| {
            if hi > lo {
                AffineMap {
                    scale: 1.0 / (hi - lo),
                    offset: -lo / (hi - lo),
                    degenerate: false,
                }
            } else {
                AffineMap {
                    scale: 0.0,
                    offset: 0.5,
                    degenerate: true,
                }
            }
        })
        .collect();
    let payoffs = (0..game.num_players())
        .map(|k| {
            game.table(k)
                .iter()
                .map(|&v| maps[k].apply(v).clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    let out = FiniteGame::new(game.action_counts().to_vec(), payoffs).expect("same shape");
    (out, maps)
}

/// JSON game description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    #[serde(default)]
    pub players: Option<usize>,
    #[serde(default)]
    pub actions: Option<Vec<usize>>,
    #[serde(default)]
    pub payoffs: Option<Vec<Value>>,
    #[serde(default)]
    pub congestion: Option<CongestionSpec>,
}

impl GameSpec {
    pub fn build(&self) -> Result<FiniteGame> {
        let game = match (&self.payoffs, &self.congestion) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either `payoffs` or `congestion`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config("game needs `payoffs` or `congestion`".into()))
            }
            (None, Some(c)) => congestion_game(c).map_err(|e| Error::Config(e.to_string()))?,
            (Some(tables), None) => {
                let actions = self
                    .actions
                    .clone()
                    .ok_or_else(|| Error::Config("`actions` is required with `payoffs`".into()))?;
                let mut flat = Vec::with_capacity(tables.len());
                for (k, t) in tables.iter().enumerate() {
                    let mut out = Vec::new();
                    flatten_nested(t, &actions, 0, &mut out)
                        .map_err(|m| Error::Config(format!("payoffs of player {k}: {m}")))?;
                    flat.push(out);
                }
                FiniteGame::new(actions, flat).map_err(|e| Error::Config(e.to_string()))?
            }
        };
        if let Some(p) = self.players {
            if p != game.num_players() {
                return Err(Error::Config(format!(
                    "`players` is {p} but the game has {}",
                    game.num_players()
                )));
            }
        }
        if let Some(a) = &self.actions {
            if a.as_slice() != game.action_counts() {
                return Err(Error::Config(format!(
                    "`actions` {a:?} does not match the game {:?}",
                    game.action_counts()
                )));
            }
        }
        Ok(game)
    }

    /// Serializes a game back into nested payoff arrays.
    pub fn from_game(game: &FiniteGame) -> GameSpec {
        let payoffs = (0..game.num_players())
            .map(|k| nest(game.table(k), game.action_counts()))
            .collect();
        GameSpec {
            players: Some(game.num_players()),
            actions: Some(game.action_counts().to_vec()),
            payoffs: Some(payoffs),
            congestion: None,
        }
    }
}

fn flatten_nested(
    v: &Value,
    shape: &[usize],
    depth: usize,
    out: &mut Vec<f64>,
) -> std::result::Result<(), String> {
    if depth == shape.len() {
        let x = v
            .as_f64()
            .ok_or_else(|| format!("expected a number, found {v}"))?;
        if !x.is_finite() {
            return Err("non-finite payoff".into());
        }
        out.push(x);
        return Ok(());
    }
    let arr = v
        .as_array()
        .ok_or_else(|| format!("expected an array at depth {depth}"))?;
    if arr.len() != shape[depth] {
        return Err(format!(
            "array at depth {depth} has length {}, expected {}",
            arr.len(),
            shape[depth]
        ));
    }
    arr.iter()
        .try_for_each(|item| flatten_nested(item, shape, depth + 1, out))
}

fn nest(flat: &[f64], shape: &[usize]) -> Value {
    if shape.is_empty() {
        return Value::from(flat[0]);
    }
    let chunk = flat.len() / shape[0];
    Value::Array(flat.chunks(chunk).map(|c| nest(c, &shape[1..])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_payoff_examples() {
        let g = FiniteGame::coordination();
        let x = MixedProfile::pure(&[2, 2], &[0, 0]);
        assert_eq!(g.expected_payoff(&x, 1, 0).unwrap(), 1.0);
        let b = MixedProfile::uniform(&[2, 2]);
        assert!((g.expected_payoff(&b, 1, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!(g.expected_payoff(&b, 2, 0).is_err());
        assert!(g.expected_payoff(&b, 0, 2).is_err());
    }

    #[test]
    fn payoff_vectors_match_expected_payoff() {
        let g = FiniteGame::from_fn(vec![2, 3, 2], |k, p| {
            (k as f64 + 1.0) * (p[0] as f64) - (p[1] * p[2]) as f64 + 0.3 * k as f64
        })
        .unwrap();
        let x = MixedProfile::new(vec![vec![0.3, 0.7], vec![0.2, 0.5, 0.3], vec![0.9, 0.1]]);
        let v = g.payoff_vectors(&x);
        for k in 0..3 {
            for a in 0..g.action_counts()[k] {
                let e = g.expected_payoff(&x, k, a).unwrap();
                assert!((v[k][a] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let g = FiniteGame::zero(vec![2, 3, 4]);
        for i in 0..g.num_profiles() {
            assert_eq!(g.encode(&g.decode(i)), i);
        }
    }

    #[test]
    fn matching_pennies_is_not_potential() {
        let c = fit_potential(&FiniteGame::matching_pennies(), POTENTIAL_TOL);
        assert!(c.residual > 0.1);
        assert!(!c.is_potential());
    }

    #[test]
    fn identical_interest_potential_is_the_payoff() {
        let g = FiniteGame::from_fn(vec![3, 2], |_, p| (p[0] * 2 + p[1]) as f64 * 0.7).unwrap();
        let c = fit_potential(&g, POTENTIAL_TOL);
        assert!(c.residual <= 1e-12);
        for (i, &u) in c.potential_values.iter().enumerate() {
            assert!((u - g.table(0)[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_maps() {
        let g = FiniteGame::matching_pennies();
        let (n, maps) = normalize_payoffs(&g);
        assert_eq!(maps[0].scale, 0.5);
        assert_eq!(maps[0].offset, 0.5);
        assert!(n.table(0).iter().all(|v| (0.0..=1.0).contains(v)));
        let (_, maps) = normalize_payoffs(&FiniteGame::zero(vec![2, 2]));
        assert!(maps[1].degenerate);
    }

    #[test]
    fn json_round_trip() {
        let g = FiniteGame::dominant();
        let spec = GameSpec::from_game(&g);
        let text = serde_json::to_string(&spec).unwrap();
        let back: GameSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build().unwrap(), g);
    }

    #[test]
    fn json_shape_errors() {
        let spec: GameSpec =
            serde_json::from_str(r#"{"actions":[2,2],"payoffs":[[[1,0],[0]],[[1,0],[0,1]]]}"#)
                .unwrap();
        assert!(matches!(spec.build(), Err(Error::Config(_))));
    }
}
