//! Free energy, divergence, linear stability, convergence rates and vertex
//! attraction.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::fields::{ed_field, field_norm, relative_scores, zd_field};
use super::integrate::{integrate_scores, IntegrateOptions, Representation, Trajectory};
use super::DynamicsSpec;
use crate::error::{Error, Result};
use crate::games::PotentialCertificate;
use crate::profile::{MixedProfile, RelativeScores};

/// Central-difference step for Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Central-difference step for the divergence.
pub const DIVERGENCE_STEP: f64 = 1e-5;
/// Real parts within this band of zero are nonhyperbolic.
pub const HYPERBOLIC_TOL: f64 = 1e-9;

/// `F(x) = T Σ_k h(x_k) − U(x)`.
pub fn free_energy(
    spec: &DynamicsSpec,
    cert: &PotentialCertificate,
    x: &MixedProfile,
) -> Result<f64> {
    if cert.potential_values.len() != spec.game.num_profiles() {
        return Err(Error::Precondition(
            "potential certificate does not belong to this game".into(),
        ));
    }
    if !cert.is_potential() {
        return Err(Error::Precondition(format!(
            "game is not potential (residual {:e})",
            cert.residual
        )));
    }
    if !x.is_interior() {
        return Err(Error::domain("free energy needs an interior profile"));
    }
    let h: f64 = x.blocks().iter().map(|xk| spec.entropy.value(xk)).sum();
    Ok(spec.temperature * h - cert.evaluate(spec.game, x))
}

fn flat_field(spec: &DynamicsSpec, z: &[f64], dims: &[usize]) -> Result<Vec<f64>> {
    Ok(zd_field(spec, &RelativeScores::from_flat(z, dims))?.flatten())
}

/// Central-difference Jacobian of the score-space field.
pub fn zd_jacobian(spec: &DynamicsSpec, z: &RelativeScores, step: f64) -> Result<DMatrix<f64>> {
    let dims = z.dims();
    let base = z.flatten();
    let n = base.len();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += step;
        minus[j] -= step;
        let fp = flat_field(spec, &plus, &dims)?;
        let fm = flat_field(spec, &minus, &dims)?;
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Finite-difference divergence of the score-space field.
pub fn zd_divergence(spec: &DynamicsSpec, z: &RelativeScores) -> Result<f64> {
    let dims = z.dims();
    let base = z.flatten();
    let mut trace = 0.0;
    for j in 0..base.len() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += DIVERGENCE_STEP;
        minus[j] -= DIVERGENCE_STEP;
        let fp = flat_field(spec, &plus, &dims)?;
        let fm = flat_field(spec, &minus, &dims)?;
        trace += (fp[j] - fm[j]) / (2.0 * DIVERGENCE_STEP);
    }
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Nonhyperbolic,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Nonhyperbolic => "nonhyperbolic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestPointClass {
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real: f64,
    pub tag: Stability,
}

/// Tags eigenvalues by the sign of their largest real part.
pub fn classify_eigenvalues(eigenvalues: Vec<Complex<f64>>) -> RestPointClass {
    let max_real = eigenvalues
        .iter()
        .map(|c| c.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let tag = if max_real < -HYPERBOLIC_TOL {
        Stability::Stable
    } else if max_real > HYPERBOLIC_TOL {
        Stability::Unstable
    } else {
        Stability::Nonhyperbolic
    };
    RestPointClass {
        eigenvalues,
        max_real,
        tag,
    }
}

/// Linear stability of an interior rest point from the score-space Jacobian.
pub fn classify_rest_point(spec: &DynamicsSpec, x_star: &MixedProfile) -> Result<RestPointClass> {
    let norm = field_norm(&ed_field(spec, x_star)?);
    if norm >= super::integrate::REST_TOL {
        return Err(Error::Precondition(format!(
            "not a rest point: field norm {norm:e}"
        )));
    }
    let z = relative_scores(&spec.entropy, x_star)?;
    classify_scores(spec, &z)
}

/// Linear stability at relative scores `z`, without the rest-point check.
pub fn classify_scores(spec: &DynamicsSpec, z: &RelativeScores) -> Result<RestPointClass> {
    let jac = zd_jacobian(spec, z, JACOBIAN_STEP)?;
    Ok(classify_eigenvalues(
        jac.complex_eigenvalues().iter().copied().collect(),
    ))
}

/// Comparison of a score-space trajectory with the closed-form escape law
/// `z(t) = z₀ e^{|T|t} + Δu(q*) (e^{|T|t} − 1)/|T|` near a vertex `q*`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateReport {
    /// Pure profile the trajectory approaches.
    pub vertex: Vec<usize>,
    /// `max |z_obs − z_pred| / max |z_pred|` over the window.
    pub relative_error: f64,
    /// Least-squares slope of each relative score against time.
    pub slopes: Vec<Vec<f64>>,
    /// `R²` of the linear fit of `log(1 − x_{k,q*}(t))` on the second half of
    /// the window, per player.
    pub log_gap_r2: Vec<f64>,
    /// False when the trajectory does not approach a vertex.
    pub valid: bool,
}

fn linear_fit(t: &[f64], v: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(v).map(|(a, b)| (a - mt) * (b - mv)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    let syy: f64 = v.iter().map(|b| (b - mv) * (b - mv)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

/// Fits a score-space trajectory against the vertex escape law.
pub fn rate_check(spec: &DynamicsSpec, traj: &Trajectory) -> Result<RateReport> {
    if spec.temperature > 0.0 {
        return Err(Error::Precondition(
            "rate check applies to non-positive temperatures".into(),
        ));
    }
    let scores = traj
        .scores
        .as_ref()
        .ok_or_else(|| Error::Precondition("rate check needs a score-space trajectory".into()))?;
    if traj.times.len() < 4 {
        return Err(Error::Precondition("trajectory too short for a fit".into()));
    }
    let last = traj.last_state();
    let vertex: Vec<usize> = last
        .blocks()
        .iter()
        .map(|b| (0..b.len()).fold(0, |i, j| if b[j] > b[i] { j } else { i }))
        .collect();
    let valid = last
        .blocks()
        .iter()
        .zip(&vertex)
        .all(|(b, &a)| b[a] > 1.0 - 1e-3);

    let counts = spec.game.action_counts();
    let q = MixedProfile::pure(counts, &vertex);
    let u = spec.game.payoff_vectors(&q);
    let a = spec.temperature.abs();
    let z0 = &scores[0];
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (t, z) in traj.times.iter().zip(scores) {
        let growth = (a * t).exp();
        let ramp = if a == 0.0 { *t } else { (growth - 1.0) / a };
        for k in 0..z.0.len() {
            for m in 0..z.0[k].len() {
                let du = u[k][m + 1] - u[k][0];
                let pred = z0.0[k][m] * growth + du * ramp;
                err = err.max((z.0[k][m] - pred).abs());
                scale = scale.max(pred.abs());
            }
        }
    }
    let slopes = (0..z0.0.len())
        .map(|k| {
            (0..z0.0[k].len())
                .map(|m| {
                    let v: Vec<f64> = scores.iter().map(|z| z.0[k][m]).collect();
                    linear_fit(&traj.times, &v).0
                })
                .collect()
        })
        .collect();
    let half = traj.times.len() / 2;
    let log_gap_r2 = vertex
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let t = &traj.times[half..];
            let v: Vec<f64> = traj.states[half..]
                .iter()
                .map(|x| {
                    let gap: f64 = (0..x.player(k).len())
                        .filter(|&b| b != a)
                        .map(|b| x.player(k)[b])
                        .sum();
                    gap.ln()
                })
                .collect();
            linear_fit(t, &v).1
        })
        .collect();
    Ok(RateReport {
        vertex,
        relative_error: err / scale.max(f64::MIN_POSITIVE),
        slopes,
        log_gap_r2,
        valid,
    })
}

/// Score advantage of action `a` over every other action, from relative scores.
fn advantage(zk: &[f64], a: usize) -> f64 {
    let y = |b: usize| if b == 0 { 0.0 } else { zk[b - 1] };
    (0..=zk.len())
        .filter(|&b| b != a)
        .map(|b| y(a) - y(b))
        .fold(f64::INFINITY, f64::min)
}

/// Depth of relative score past which escape towards a vertex is certain for
/// `T < 0`; a fixed depth is used at `T = 0`.
pub fn escape_depth(spec: &DynamicsSpec) -> f64 {
    let span = spec.game.payoff_spans().into_iter().fold(0.0, f64::max);
    if spec.temperature < 0.0 {
        (1.5 * span / spec.temperature.abs() + 5.0).min(VERTEX_DEPTH_CAP)
    } else {
        60.0
    }
}

const VERTEX_DEPTH_CAP: f64 = 650.0;

/// Integrates in score space from `x0` and reports whether the orbit is
/// captured by the pure profile `vertex`: every player's score advantage for
/// the vertex action must pass [`escape_depth`].
pub fn vertex_attracts(
    spec: &DynamicsSpec,
    vertex: &[usize],
    x0: &MixedProfile,
    t_max: f64,
) -> Result<bool> {
    if spec.temperature > 0.0 {
        // The score band keeps every orbit a bounded distance from the boundary.
        return Ok(false);
    }
    let depth = escape_depth(spec);
    let mut z = relative_scores(&spec.entropy, x0)?;
    let chunk = 1.0;
    let mut t = 0.0;
    while t < t_max {
        let captured = z
            .blocks()
            .iter()
            .zip(vertex)
            .all(|(zk, &a)| advantage(zk, a) >= depth);
        if captured {
            return Ok(true);
        }
        let mut opts =
            IntegrateOptions::new(chunk, super::integrate::DEFAULT_DT, Representation::Score);
        opts.record_every = usize::MAX;
        let traj = integrate_scores(spec, &z, &opts)?;
        z = traj.scores.unwrap().pop().unwrap();
        if traj.status == super::integrate::TrajectoryStatus::RestPoint {
            return Ok(false);
        }
        t += chunk;
    }
    Ok(false)
}
