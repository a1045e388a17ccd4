//! Fixed-step RK4 integration in score space or strategy space.

use serde::{Deserialize, Serialize};

use super::fields::{choice_profile, ed_field, field_norm, relative_scores, zd_field_at};
use super::DynamicsSpec;
use crate::error::{Error, Result};
use crate::games::PotentialCertificate;
use crate::profile::{MixedProfile, RelativeScores};

/// Default RK4 step.
pub const DEFAULT_DT: f64 = 0.01;
/// A state whose field norm falls below this is reported as a rest point.
pub const REST_TOL: f64 = 1e-8;
/// Relative scores beyond this magnitude are treated as having reached a vertex.
pub const VERTEX_CAP: f64 = 700.0;
/// Strategy-space integration fails once a coordinate drops below this.
pub const STRATEGY_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// Integrate relative scores and map them through the choice map.
    Score,
    /// Integrate mixed strategies directly.
    Strategy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryStatus {
    /// Reached `t_end`.
    Completed,
    /// The field norm dropped below the rest tolerance.
    RestPoint,
    /// Some relative score exceeded the vertex cap.
    VertexConverged,
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub t_end: f64,
    pub dt: f64,
    pub space: Representation,
    pub rest_tol: f64,
    /// Stop as soon as a rest point is detected.
    pub stop_at_rest: bool,
    /// Keep every `record_every`-th step (the final state is always kept).
    pub record_every: usize,
    /// When present, free energy is recorded alongside the field norm.
    pub potential: Option<PotentialCertificate>,
}

impl IntegrateOptions {
    pub fn new(t_end: f64, dt: f64, space: Representation) -> Self {
        IntegrateOptions {
            t_end,
            dt,
            space,
            rest_tol: REST_TOL,
            stop_at_rest: true,
            record_every: 1,
            potential: None,
        }
    }
}

/// Per-sample diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub free_energy: Option<f64>,
    /// Field norm in the integrated representation.
    pub field_norm: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MixedProfile>,
    /// Relative scores, recorded in score-space mode.
    pub scores: Option<Vec<RelativeScores>>,
    pub representation: Representation,
    pub diagnostics: Vec<Diagnostic>,
    pub status: TrajectoryStatus,
    /// Largest per-player sum error seen before renormalization (strategy mode).
    pub max_sum_drift: f64,
}

impl Trajectory {
    pub fn last_state(&self) -> &MixedProfile {
        self.states.last().expect("trajectories are never empty")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectories are never empty")
    }
}

/// Integrates from `x0` with default options.
pub fn integrate(
    spec: &DynamicsSpec,
    x0: &MixedProfile,
    t_end: f64,
    dt: f64,
    space: Representation,
) -> Result<Trajectory> {
    integrate_with(spec, x0, &IntegrateOptions::new(t_end, dt, space))
}

fn check_options(opts: &IntegrateOptions) -> Result<()> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Error::invalid("dt must be positive"));
    }
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) {
        return Err(Error::invalid("t_end must be positive"));
    }
    if opts.record_every == 0 {
        return Err(Error::invalid("record_every must be at least 1"));
    }
    Ok(())
}

pub fn integrate_with(
    spec: &DynamicsSpec,
    x0: &MixedProfile,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    check_options(opts)?;
    x0.validate(spec.game.action_counts())?;
    if !x0.is_interior() {
        return Err(Error::domain("initial profile must be interior"));
    }
    match opts.space {
        Representation::Score => {
            let z0 = relative_scores(&spec.entropy, x0)?;
            integrate_scores(spec, &z0, opts)
        }
        Representation::Strategy => integrate_strategy(spec, x0, opts),
    }
}

fn diagnostic(
    spec: &DynamicsSpec,
    opts: &IntegrateOptions,
    x: &MixedProfile,
    norm: f64,
) -> Result<Diagnostic> {
    let free_energy = match &opts.potential {
        Some(cert) => Some(super::diagnostics::free_energy(spec, cert, x)?),
        None => None,
    };
    Ok(Diagnostic {
        free_energy,
        field_norm: norm,
    })
}

fn axpy(z: &RelativeScores, a: f64, d: &RelativeScores) -> RelativeScores {
    RelativeScores(
        z.0.iter()
            .zip(&d.0)
            .map(|(zk, dk)| zk.iter().zip(dk).map(|(u, v)| u + a * v).collect())
            .collect(),
    )
}

/// Integrates the score-space field from relative scores `z0`.
pub fn integrate_scores(
    spec: &DynamicsSpec,
    z0: &RelativeScores,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    check_options(opts)?;
    let entropy = &spec.entropy;
    let field = |z: &RelativeScores| -> Result<(MixedProfile, RelativeScores)> {
        let x = choice_profile(entropy, z)?;
        let f = zd_field_at(spec, z, &x);
        Ok((x, f))
    };

    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let mut z = z0.clone();
    let (mut x, mut f) = field(&z)?;
    let mut norm = field_norm(f.blocks());
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        scores: Some(vec![z.clone()]),
        representation: Representation::Score,
        diagnostics: vec![diagnostic(spec, opts, &x, norm)?],
        status: TrajectoryStatus::Completed,
        max_sum_drift: 0.0,
    };
    let dt = opts.dt;
    for step in 1..=steps {
        if opts.stop_at_rest && norm < opts.rest_tol {
            traj.status = TrajectoryStatus::RestPoint;
            break;
        }
        if z.norm_inf() > VERTEX_CAP {
            traj.status = TrajectoryStatus::VertexConverged;
            break;
        }
        let k1 = f.clone();
        let (_, k2) = field(&axpy(&z, dt / 2.0, &k1))?;
        let (_, k3) = field(&axpy(&z, dt / 2.0, &k2))?;
        let (_, k4) = field(&axpy(&z, dt, &k3))?;
        for (k, zk) in z.0.iter_mut().enumerate() {
            for (m, zm) in zk.iter_mut().enumerate() {
                *zm += dt / 6.0 * (k1.0[k][m] + 2.0 * k2.0[k][m] + 2.0 * k3.0[k][m] + k4.0[k][m]);
            }
        }
        if !z.is_finite() {
            return Err(Error::Integration {
                t: step as f64 * dt,
                message: "relative scores became non-finite".into(),
            });
        }
        (x, f) = field(&z)?;
        norm = field_norm(f.blocks());
        let last = step == steps
            || (opts.stop_at_rest && norm < opts.rest_tol)
            || z.norm_inf() > VERTEX_CAP;
        if step % opts.record_every == 0 || last {
            traj.times.push(step as f64 * dt);
            traj.states.push(x.clone());
            traj.scores.as_mut().unwrap().push(z.clone());
            traj.diagnostics.push(diagnostic(spec, opts, &x, norm)?);
        }
    }
    if traj.status == TrajectoryStatus::Completed {
        if opts.stop_at_rest && norm < opts.rest_tol {
            traj.status = TrajectoryStatus::RestPoint;
        } else if z.norm_inf() > VERTEX_CAP {
            traj.status = TrajectoryStatus::VertexConverged;
        }
    }
    Ok(traj)
}

fn integrate_strategy(
    spec: &DynamicsSpec,
    x0: &MixedProfile,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let dt = opts.dt;
    let shift = |x: &MixedProfile, a: f64, d: &[Vec<f64>]| {
        MixedProfile(
            x.0.iter()
                .zip(d)
                .map(|(xk, dk)| xk.iter().zip(dk).map(|(u, v)| u + a * v).collect())
                .collect(),
        )
    };
    let fail = |t: f64| Error::Integration {
        t,
        message: format!(
            "a coordinate dropped below {STRATEGY_FLOOR:e}; integrate in score space instead"
        ),
    };
    let mut x = x0.clone();
    let mut f = ed_field(spec, &x)?;
    let mut norm = field_norm(&f);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        scores: None,
        representation: Representation::Strategy,
        diagnostics: vec![diagnostic(spec, opts, &x, norm)?],
        status: TrajectoryStatus::Completed,
        max_sum_drift: 0.0,
    };
    let stage = |x: &MixedProfile, t: f64| -> Result<Vec<Vec<f64>>> {
        if x.min_coordinate() < STRATEGY_FLOOR {
            return Err(fail(t));
        }
        ed_field(spec, x)
    };
    for step in 1..=steps {
        if opts.stop_at_rest && norm < opts.rest_tol {
            traj.status = TrajectoryStatus::RestPoint;
            break;
        }
        let t = step as f64 * dt;
        let k1 = f.clone();
        let k2 = stage(&shift(&x, dt / 2.0, &k1), t)?;
        let k3 = stage(&shift(&x, dt / 2.0, &k2), t)?;
        let k4 = stage(&shift(&x, dt, &k3), t)?;
        for (k, xk) in x.0.iter_mut().enumerate() {
            for (a, xa) in xk.iter_mut().enumerate() {
                *xa += dt / 6.0 * (k1[k][a] + 2.0 * k2[k][a] + 2.0 * k3[k][a] + k4[k][a]);
            }
        }
        traj.max_sum_drift = traj.max_sum_drift.max(x.max_sum_error());
        x.renormalize();
        if x.0.iter().flatten().any(|v| !v.is_finite()) || x.min_coordinate() < STRATEGY_FLOOR {
            return Err(fail(t));
        }
        f = ed_field(spec, &x)?;
        norm = field_norm(&f);
        let last = step == steps || (opts.stop_at_rest && norm < opts.rest_tol);
        if step % opts.record_every == 0 || last {
            traj.times.push(t);
            traj.states.push(x.clone());
            traj.diagnostics.push(diagnostic(spec, opts, &x, norm)?);
        }
    }
    if traj.status == TrajectoryStatus::Completed && opts.stop_at_rest && norm < opts.rest_tol {
        traj.status = TrajectoryStatus::RestPoint;
    }
    Ok(traj)
}
