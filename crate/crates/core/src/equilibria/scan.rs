//! Rest points of 2×2 games across a range of temperatures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qre::newton_rest_point;
use crate::dynamics::{
    choice_profile, classify_scores, escape_depth, vertex_attracts, DynamicsSpec,
};
use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::games::FiniteGame;
use crate::profile::{MixedProfile, RelativeScores};

/// Seeds per axis of the initial-condition grid.
pub const SEED_GRID: usize = 21;
/// Rest points closer than this (∞-norm) are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Width to which critical temperatures are refined.
pub const CRITICAL_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestPointKind {
    Interior,
    Vertex,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRestPoint {
    pub x: MixedProfile,
    pub kind: RestPointKind,
    /// Largest real part of the score-space Jacobian (interior points only).
    pub max_eig_real: Option<f64>,
    /// `stable`, `unstable`, `nonhyperbolic` for interior points;
    /// `attracting` or `not-attracting` for vertices.
    pub tag: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanEntry {
    pub temperature: f64,
    pub rest_points: Vec<ScanRestPoint>,
}

impl ScanEntry {
    pub fn interior_count(&self) -> usize {
        self.rest_points
            .iter()
            .filter(|r| r.kind == RestPointKind::Interior)
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalMethod {
    /// Bisection on the sign of a continued rest point's critical eigenvalue.
    Eigenvalue,
    /// Bisection on the number of interior rest points.
    Count,
    /// The change happens at `T = 0`, where interior rest points reach the
    /// boundary.
    ZeroTemperature,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalTemperature {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    /// Interior rest points just below and just above.
    pub count_below: usize,
    pub count_above: usize,
    pub method: CriticalMethod,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BifurcationScan {
    pub entries: Vec<ScanEntry>,
    pub critical: Vec<CriticalTemperature>,
}

fn seed_scores(spec: &DynamicsSpec) -> Vec<RelativeScores> {
    let grid: Vec<f64> = (0..SEED_GRID)
        .map(|i| 0.025 + 0.95 * i as f64 / (SEED_GRID - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(SEED_GRID * SEED_GRID + 4);
    for &p in &grid {
        for &q in &grid {
            let seed = MixedProfile::new(vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]);
            if let Ok(z) = crate::dynamics::relative_scores(&spec.entropy, &seed) {
                out.push(z);
            }
        }
    }
    // Near-vertex rest points sit at z ≈ Δu(vertex)/T, far outside the grid
    // when |T| is small.
    if spec.temperature != 0.0 {
        for a in 0..2 {
            for b in 0..2 {
                let v = MixedProfile::pure(&[2, 2], &[a, b]);
                let u = spec.game.payoff_vectors(&v);
                out.push(RelativeScores(
                    u.iter()
                        .map(|uk| vec![(uk[1] - uk[0]) / spec.temperature])
                        .collect(),
                ));
            }
        }
    }
    out
}

/// Bound on the distance from a computed rest point to the true one, from
/// the field residual and the smallest singular value of the Jacobian.
fn location_error(spec: &DynamicsSpec, z: &RelativeScores, x: &MixedProfile) -> f64 {
    let f = crate::dynamics::zd_field_at(spec, z, x).flatten();
    let fnorm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sigma = crate::dynamics::zd_jacobian_exact(spec, x)
        .map(|j| j.singular_values().min())
        .unwrap_or(0.0);
    if sigma > 0.0 {
        (fnorm / sigma).min(1e-2)
    } else {
        1e-2
    }
}

/// All interior rest points found by Newton from the seed grid, deduplicated.
///
/// Two points merge when closer than [`DEDUP_RADIUS`] or than their combined
/// location error, which is what separates numerically distinct copies of a
/// degenerate rest point.
pub fn interior_rest_points(spec: &DynamicsSpec) -> Vec<(RelativeScores, MixedProfile)> {
    let mut found: Vec<(RelativeScores, MixedProfile, f64)> = Vec::new();
    for z0 in seed_scores(spec) {
        if let Ok((z, x)) = newton_rest_point(spec, &z0) {
            let err = location_error(spec, &z, &x);
            let dup = found
                .iter()
                .any(|(_, y, e)| y.dist_inf(&x) < DEDUP_RADIUS.max(2.0 * (err + e)));
            if !dup {
                found.push((z, x, err));
            }
        }
    }
    found.sort_by(|a, b| {
        a.1.flatten()
            .partial_cmp(&b.1.flatten())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    found.into_iter().map(|(z, x, _)| (z, x)).collect()
}

/// Relative scores placing the vertex action `depth` ahead of every other action.
pub fn vertex_scores(action_counts: &[usize], vertex: &[usize], depth: f64) -> RelativeScores {
    RelativeScores(
        action_counts
            .iter()
            .zip(vertex)
            .map(|(&n, &a)| {
                (1..n)
                    .map(|m| {
                        if m == a {
                            depth
                        } else if a == 0 {
                            -depth
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Starting depth for vertex-attraction probes: just outside the score band
/// for `T < 0`, a fixed moderate depth at `T = 0`.
pub fn probe_depth(spec: &DynamicsSpec) -> f64 {
    let span = spec.game.payoff_spans().into_iter().fold(0.0, f64::max);
    if spec.temperature < 0.0 {
        1.2 * span / spec.temperature.abs() + 1.0
    } else {
        3.0
    }
}

/// Whether an orbit started near the pure profile `vertex` converges to it.
pub fn probe_vertex(spec: &DynamicsSpec, vertex: &[usize]) -> Result<bool> {
    let z = vertex_scores(spec.game.action_counts(), vertex, probe_depth(spec));
    let x = choice_profile(&spec.entropy, &z)?;
    let t_max = 4.0 * escape_depth(spec) + 200.0;
    vertex_attracts(spec, vertex, &x, t_max)
}

/// Rest points of a 2×2 game at one temperature with their stability tags.
/// Vertices are probed for attraction only when `T ≤ 0`.
pub fn scan_temperature(game: &FiniteGame, entropy: &Entropy, t: f64) -> Result<ScanEntry> {
    if game.action_counts() != [2, 2] {
        return Err(Error::invalid("temperature scans support 2×2 games only"));
    }
    let spec = DynamicsSpec::new(game, *entropy, t);
    let mut rest_points = Vec::new();
    for (z, x) in interior_rest_points(&spec) {
        let class = classify_scores(&spec, &z)?;
        rest_points.push(ScanRestPoint {
            x,
            kind: RestPointKind::Interior,
            max_eig_real: Some(class.max_real),
            tag: class.tag.as_str().into(),
        });
    }
    if t <= 0.0 {
        for a in 0..2 {
            for b in 0..2 {
                let attracts = probe_vertex(&spec, &[a, b])?;
                rest_points.push(ScanRestPoint {
                    x: MixedProfile::pure(&[2, 2], &[a, b]),
                    kind: RestPointKind::Vertex,
                    max_eig_real: None,
                    tag: if attracts {
                        "attracting"
                    } else {
                        "not-attracting"
                    }
                    .into(),
                });
            }
        }
    }
    Ok(ScanEntry {
        temperature: t,
        rest_points,
    })
}

fn count_at(game: &FiniteGame, entropy: &Entropy, t: f64) -> usize {
    interior_rest_points(&DynamicsSpec::new(game, *entropy, t)).len()
}

/// Scans temperatures, classifies every rest point and locates the
/// temperatures where the number of interior rest points changes.
pub fn bifurcation_scan(
    game: &FiniteGame,
    entropy: &Entropy,
    temperatures: &[f64],
) -> Result<BifurcationScan> {
    if game.action_counts() != [2, 2] {
        return Err(Error::invalid("bifurcation scans support 2×2 games only"));
    }
    if temperatures.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("temperatures must be finite"));
    }
    let mut temps = temperatures.to_vec();
    temps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    temps.dedup();
    let entries: Vec<ScanEntry> = temps
        .par_iter()
        .map(|&t| scan_temperature(game, entropy, t))
        .collect::<Result<_>>()?;

    let critical: Vec<CriticalTemperature> = entries
        .windows(2)
        .filter(|w| w[0].interior_count() != w[1].interior_count())
        .collect::<Vec<_>>()
        .par_iter()
        .map(|w| refine(game, entropy, &w[0], &w[1]))
        .collect();
    Ok(BifurcationScan { entries, critical })
}

/// Refines a count change between two scan entries, preferring an eigenvalue
/// crossing of a rest point that persists across the interval.
fn refine(
    game: &FiniteGame,
    entropy: &Entropy,
    lo: &ScanEntry,
    hi: &ScanEntry,
) -> CriticalTemperature {
    let (count_below, count_above) = (lo.interior_count(), hi.interior_count());
    if lo.temperature <= 0.0 && hi.temperature >= 0.0 {
        // Off-center rest points leave through the boundary at T = 0.
        return CriticalTemperature {
            lower: lo.temperature,
            upper: hi.temperature,
            estimate: 0.0,
            count_below,
            count_above,
            method: CriticalMethod::ZeroTemperature,
        };
    }
    if let Some(c) = eigen_crossing(game, entropy, lo, hi) {
        return CriticalTemperature {
            lower: c.0,
            upper: c.1,
            estimate: 0.5 * (c.0 + c.1),
            count_below,
            count_above,
            method: CriticalMethod::Eigenvalue,
        };
    }
    let (mut a, mut b) = (lo.temperature, hi.temperature);
    while b - a > CRITICAL_TOL {
        let m = 0.5 * (a + b);
        if count_at(game, entropy, m) == count_below {
            a = m;
        } else {
            b = m;
        }
    }
    CriticalTemperature {
        lower: a,
        upper: b,
        estimate: 0.5 * (a + b),
        count_below,
        count_above,
        method: CriticalMethod::Count,
    }
}

/// The real eigenvalue of the Jacobian closest to zero; its sign flips when a
/// rest point passes through a fold or a pitchfork.
fn critical_eigenvalue(spec: &DynamicsSpec, z: &RelativeScores) -> Option<f64> {
    let class = classify_scores(spec, z).ok()?;
    class
        .eigenvalues
        .iter()
        .filter(|c| c.im.abs() <= 1e-12 * (1.0 + c.re.abs()))
        .map(|c| c.re)
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
}

/// Continues each interior rest point at `lo` towards `hi` and bisects on
/// the sign of its critical eigenvalue. A crossing that lands exactly on `hi`
/// is accepted when the eigenvalue there is numerically zero.
fn eigen_crossing(
    game: &FiniteGame,
    entropy: &Entropy,
    lo: &ScanEntry,
    hi: &ScanEntry,
) -> Option<(f64, f64)> {
    let (t0, t1) = (lo.temperature, hi.temperature);
    for r in lo
        .rest_points
        .iter()
        .filter(|r| r.kind == RestPointKind::Interior)
    {
        let Ok(z0) = crate::dynamics::relative_scores(entropy, &r.x) else {
            continue;
        };
        let Some(s0) = critical_eigenvalue(&DynamicsSpec::new(game, *entropy, t0), &z0) else {
            continue;
        };
        let (mut a, mut b) = (t0, t1);
        let (mut za, mut xa, mut sa) = (z0, r.x.clone(), s0);
        let mut flipped = false;
        while b - a > CRITICAL_TOL {
            let m = 0.5 * (a + b);
            let spec = DynamicsSpec::new(game, *entropy, m);
            let Ok((zm, xm)) = newton_rest_point(&spec, &za) else {
                break;
            };
            if xm.dist_inf(&xa) > 0.1 {
                break;
            }
            let Some(sm) = critical_eigenvalue(&spec, &zm) else {
                break;
            };
            if sm.signum() == sa.signum() {
                a = m;
                za = zm;
                xa = xm;
                sa = sm;
            } else {
                b = m;
                flipped = true;
            }
        }
        if b - a > CRITICAL_TOL {
            continue;
        }
        if flipped {
            return Some((a, b));
        }
        let spec = DynamicsSpec::new(game, *entropy, t1);
        if let Ok((z1, x1)) = newton_rest_point(&spec, &za) {
            if let Some(s1) = critical_eigenvalue(&spec, &z1) {
                if x1.dist_inf(&xa) <= 0.1 && (s1.signum() != sa.signum() || s1.abs() < 1e-6) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}
