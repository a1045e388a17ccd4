//! Vector fields in score space and strategy space.

use nalgebra::DMatrix;

use super::DynamicsSpec;
use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::profile::{MixedProfile, RelativeScores};

/// Maps relative scores to a mixed profile through each player's choice map.
pub fn choice_profile(entropy: &Entropy, z: &RelativeScores) -> Result<MixedProfile> {
    z.blocks()
        .iter()
        .map(|zk| entropy.choice_relative(zk))
        .collect::<Result<Vec<_>>>()
        .map(MixedProfile)
}

/// Relative scores of an interior profile.
pub fn relative_scores(entropy: &Entropy, x: &MixedProfile) -> Result<RelativeScores> {
    x.blocks()
        .iter()
        .map(|xk| entropy.relative_scores(xk))
        .collect::<Result<Vec<_>>>()
        .map(RelativeScores)
}

fn check_z(spec: &DynamicsSpec, z: &RelativeScores) -> Result<()> {
    let ok = z.0.len() == spec.game.num_players()
        && z.0
            .iter()
            .zip(spec.game.action_counts())
            .all(|(b, &n)| b.len() + 1 == n);
    if !ok {
        return Err(Error::invalid("relative scores do not match the game"));
    }
    if !z.is_finite() {
        return Err(Error::invalid("relative scores must be finite"));
    }
    Ok(())
}

/// `ż_{kμ} = η_k (u_{kμ}(x) − u_{k0}(x) − T z_{kμ})` with `x = Q(z)`.
pub fn zd_field(spec: &DynamicsSpec, z: &RelativeScores) -> Result<RelativeScores> {
    check_z(spec, z)?;
    let x = choice_profile(&spec.entropy, z)?;
    Ok(zd_field_at(spec, z, &x))
}

/// [`zd_field`] with the profile `x = Q(z)` already computed.
pub fn zd_field_at(spec: &DynamicsSpec, z: &RelativeScores, x: &MixedProfile) -> RelativeScores {
    let u = spec.game.payoff_vectors(x);
    let t = spec.temperature;
    RelativeScores(
        z.blocks()
            .iter()
            .zip(&u)
            .zip(&spec.rates)
            .map(|((zk, uk), eta)| {
                zk.iter()
                    .enumerate()
                    .map(|(m, zm)| eta * (uk[m + 1] - uk[0] - t * zm))
                    .collect()
            })
            .collect(),
    )
}

fn check_interior(spec: &DynamicsSpec, x: &MixedProfile) -> Result<()> {
    x.validate(spec.game.action_counts())?;
    if !x.is_interior() {
        return Err(Error::domain("profile is not interior"));
    }
    Ok(())
}

/// Entropy-driven dynamics `ẋ = η h^{-1}(Δu − T z)` in full coordinates.
///
/// Decomposable kernels use the symmetric closed form
/// `ẋ_α = η/θ″(x_α) [v_α − Θ_h Σ_β v_β/θ″(x_β)]` with `v = u − T θ′(x)`.
pub fn ed_field(spec: &DynamicsSpec, x: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    check_interior(spec, x)?;
    let u = spec.game.payoff_vectors(x);
    let t = spec.temperature;
    let mut out = Vec::with_capacity(u.len());
    for ((xk, uk), eta) in x.blocks().iter().zip(&u).zip(&spec.rates) {
        let block = match spec.entropy.kernel() {
            Some(kernel) => {
                let inv_q: Vec<f64> = xk.iter().map(|&v| 1.0 / kernel.d2(v)).collect();
                let v: Vec<f64> = xk
                    .iter()
                    .zip(uk)
                    .map(|(&xa, &ua)| ua - t * kernel.d1(xa))
                    .collect();
                let weight: f64 = inv_q.iter().sum();
                let mean: f64 = v.iter().zip(&inv_q).map(|(a, b)| a * b).sum::<f64>() / weight;
                v.iter()
                    .zip(&inv_q)
                    .map(|(va, iq)| eta * iq * (va - mean))
                    .collect()
            }
            None => {
                let z = spec.entropy.relative_scores(xk)?;
                let hinv = spec.entropy.hessian_inverse_reduced_at(xk)?;
                let v = nalgebra::DVector::from_iterator(
                    z.len(),
                    z.iter()
                        .enumerate()
                        .map(|(m, zm)| uk[m + 1] - uk[0] - t * zm),
                );
                let dw = hinv * v;
                let mut block = Vec::with_capacity(xk.len());
                block.push(-eta * dw.sum());
                block.extend(dw.iter().map(|d| eta * d));
                block
            }
        };
        out.push(block);
    }
    Ok(out)
}

/// Temperature-adjusted replicator field
/// `x_α[u_α − Σ x_β u_β] − T x_α[log x_α − Σ x_β log x_β]`, scaled by the rates.
/// This closed form does not consult the entropy of `spec`.
pub fn trd_field(spec: &DynamicsSpec, x: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    check_interior(spec, x)?;
    let u = spec.game.payoff_vectors(x);
    let t = spec.temperature;
    Ok(x.blocks()
        .iter()
        .zip(&u)
        .zip(&spec.rates)
        .map(|((xk, uk), eta)| {
            let ubar: f64 = xk.iter().zip(uk).map(|(a, b)| a * b).sum();
            let hbar: f64 = xk.iter().map(|v| v * v.ln()).sum();
            xk.iter()
                .zip(uk)
                .map(|(&xa, &ua)| eta * xa * ((ua - ubar) - t * (xa.ln() - hbar)))
                .collect()
        })
        .collect())
}

/// Score dynamics `ẏ = u − T y`.
pub fn score_field(temperature: f64, y: &[f64], u_now: &[f64]) -> Vec<f64> {
    y.iter()
        .zip(u_now)
        .map(|(yv, uv)| uv - temperature * yv)
        .collect()
}

/// Exact Jacobian of the score-space field at `z = z(x)`, assembled from the
/// payoff cross derivatives and the inverse reduced Hessians.
pub fn zd_jacobian_exact(spec: &DynamicsSpec, x: &MixedProfile) -> Result<DMatrix<f64>> {
    check_interior(spec, x)?;
    let game = spec.game;
    let dims: Vec<usize> = game.action_counts().iter().map(|n| n - 1).collect();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let total: usize = dims.iter().sum();
    let hinv: Vec<DMatrix<f64>> = x
        .blocks()
        .iter()
        .map(|xk| spec.entropy.hessian_inverse_reduced_at(xk))
        .collect::<Result<_>>()?;
    let mut jac = DMatrix::zeros(total, total);
    for k in 0..game.num_players() {
        for l in 0..game.num_players() {
            if k == l || dims[k] == 0 || dims[l] == 0 {
                continue;
            }
            let c = game.cross_payoffs(x, k, l);
            // ∂Δu_{kμ}/∂w_{lν} with x_{l0} = 1 − Σ w_l.
            let d = DMatrix::from_fn(dims[k], dims[l], |m, n| {
                (c[m + 1][n + 1] - c[0][n + 1]) - (c[m + 1][0] - c[0][0])
            });
            let block = d * &hinv[l] * spec.rates[k];
            jac.view_mut((offsets[k], offsets[l]), (dims[k], dims[l]))
                .copy_from(&block);
        }
        for m in 0..dims[k] {
            jac[(offsets[k] + m, offsets[k] + m)] -= spec.rates[k] * spec.temperature;
        }
    }
    Ok(jac)
}

/// ∞-norm of a nested field.
pub fn field_norm(v: &[Vec<f64>]) -> f64 {
    crate::profile::nested_norm_inf(v)
}
