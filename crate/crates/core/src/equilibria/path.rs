//! Predictor-corrector continuation of QRE in the rationality level.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::nash::is_pure_nash;
use super::qre::{qre_residual, QrePoint};
use crate::dynamics::{choice_profile, zd_jacobian_exact, DynamicsSpec};
use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::games::FiniteGame;
use crate::profile::{MixedProfile, RelativeScores};

/// Smallest continuation step before the path is truncated.
pub const MIN_PATH_STEP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PathStatus {
    Completed,
    /// The corrector failed with the step at its floor.
    Truncated {
        rho: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QPath {
    pub points: Vec<QrePoint>,
    /// Rationality intervals where the Jacobian determinant changed sign,
    /// signalling a fold or a branch point that the path did not take.
    pub branch_points: Vec<(f64, f64)>,
    pub status: PathStatus,
    /// Pure profile nearest to the terminal point.
    pub terminal_vertex: Vec<usize>,
    /// Whether that pure profile is a Nash equilibrium.
    pub terminal_is_nash: bool,
    /// ∞-distance from the terminal point to that pure profile.
    pub terminal_distance: f64,
}

/// `G(z, ϱ) = ϱ Δu(Q(z)) − z` together with the profile `Q(z)`.
fn residual_map(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    z: &[f64],
    dims: &[usize],
) -> Result<(DVector<f64>, DVector<f64>, MixedProfile)> {
    let zs = RelativeScores::from_flat(z, dims);
    let x = choice_profile(entropy, &zs)?;
    let u = game.payoff_vectors(&x);
    let du: Vec<f64> = u
        .iter()
        .flat_map(|uk| uk[1..].iter().map(move |v| v - uk[0]))
        .collect();
    let g = DVector::from_iterator(z.len(), du.iter().zip(z).map(|(d, zv)| rho * d - zv));
    Ok((g, DVector::from_vec(du), x))
}

/// `∂G/∂z = ϱ (∂Δu/∂w) h^{-1} − I`, from the score-space Jacobian at `T = 0`.
fn jacobian(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    x: &MixedProfile,
) -> Result<nalgebra::DMatrix<f64>> {
    let spec = DynamicsSpec::new(game, *entropy, 0.0);
    let c = zd_jacobian_exact(&spec, x)?;
    let n = c.nrows();
    Ok(c * rho - nalgebra::DMatrix::identity(n, n))
}

fn correct(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    z0: &[f64],
    dims: &[usize],
) -> Result<(Vec<f64>, MixedProfile)> {
    let mut z = z0.to_vec();
    for _ in 0..30 {
        let (g, _, x) = residual_map(game, entropy, rho, &z, dims)?;
        let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if g.amax() <= 1e-12 * scale {
            return Ok((z, x));
        }
        let j = jacobian(game, entropy, rho, &x)?;
        let d = j
            .lu()
            .solve(&(-g.clone()))
            .ok_or_else(|| Error::numerical("singular corrector Jacobian", g.amax(), z.clone()))?;
        for (zi, di) in z.iter_mut().zip(d.iter()) {
            *zi += di;
        }
        if z.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    let (g, _, x) = residual_map(game, entropy, rho, &z, dims)?;
    let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if g.amax() <= 1e-10 * scale {
        Ok((z, x))
    } else {
        Err(Error::numerical("corrector did not converge", g.amax(), z))
    }
}

/// Follows the QRE branch through the uniform profile at `ϱ = 0` up to `ϱ_max`
/// in `steps` nominal steps. Steps are halved on corrector failure or when
/// the corrected point moves too far, and the path stops when the step falls
/// below [`MIN_PATH_STEP`].
pub fn qre_path(game: &FiniteGame, entropy: &Entropy, rho_max: f64, steps: usize) -> Result<QPath> {
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(Error::invalid("rho_max must be positive"));
    }
    if steps == 0 {
        return Err(Error::invalid("steps must be positive"));
    }
    let dims: Vec<usize> = game.action_counts().iter().map(|n| n - 1).collect();
    let dim: usize = dims.iter().sum();
    let nominal = rho_max / steps as f64;

    let mut rho = 0.0;
    let mut z = vec![0.0; dim];
    let mut x = MixedProfile::uniform(game.action_counts());
    let mut points = vec![QrePoint {
        x: x.clone(),
        rationality: 0.0,
        residual: 0.0,
        support: None,
    }];
    let mut branch_points = Vec::new();
    let mut det_prev = jacobian(game, entropy, 0.0, &x)?.determinant();
    let mut h = nominal;
    let mut status = PathStatus::Completed;

    while rho < rho_max {
        let step = h.min(rho_max - rho);
        // Predictor: tangent dz/dϱ = −(∂G/∂z)^{-1} Δu.
        let (_, du, _) = residual_map(game, entropy, rho, &z, &dims)?;
        let j = jacobian(game, entropy, rho, &x)?;
        let tangent = j.lu().solve(&(-du)).unwrap_or_else(|| DVector::zeros(dim));
        let pred: Vec<f64> = z
            .iter()
            .zip(tangent.iter())
            .map(|(a, t)| a + t * step)
            .collect();
        let next = rho + step;
        let outcome = correct(game, entropy, next, &pred, &dims);
        let ok = match &outcome {
            Ok((zc, _)) => {
                let jump = zc
                    .iter()
                    .zip(&pred)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                jump <= 0.25 * (1.0 + tangent.amax() * step)
            }
            Err(_) => false,
        };
        if !ok {
            h = step / 2.0;
            if h < MIN_PATH_STEP {
                status = PathStatus::Truncated { rho };
                break;
            }
            continue;
        }
        let (zc, xc) = outcome.unwrap();
        let det = jacobian(game, entropy, next, &xc)?.determinant();
        if det.signum() != det_prev.signum() && det != 0.0 && det_prev != 0.0 {
            branch_points.push((rho, next));
        }
        det_prev = det;
        rho = next;
        z = zc;
        x = xc;
        let residual = qre_residual(game, entropy, rho, &x)?;
        points.push(QrePoint {
            x: x.clone(),
            rationality: rho,
            residual,
            support: None,
        });
        h = (h * 1.5).min(nominal);
    }

    let terminal_vertex: Vec<usize> = x
        .blocks()
        .iter()
        .map(|b| (0..b.len()).fold(0, |i, j| if b[j] > b[i] { j } else { i }))
        .collect();
    let pure = MixedProfile::pure(game.action_counts(), &terminal_vertex);
    Ok(QPath {
        terminal_is_nash: is_pure_nash(game, &terminal_vertex),
        terminal_distance: x.dist_inf(&pure),
        terminal_vertex,
        points,
        branch_points,
        status,
    })
}
