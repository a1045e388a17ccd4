//! Quantal response equilibria `x = Q(ϱ u(x))`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    choice_profile, relative_scores, zd_field_at, zd_jacobian_exact, DynamicsSpec,
};
use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::games::FiniteGame;
use crate::profile::{MixedProfile, RelativeScores};

/// Target fixed-point residual.
pub const QRE_TOL: f64 = 1e-10;
/// Iteration budget of the damped fixed-point stage.
pub const QRE_MAX_ITERS: usize = 20_000;
/// Initial damping.
pub const DAMPING_START: f64 = 0.5;
/// Smallest damping.
pub const DAMPING_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QrePoint {
    pub x: MixedProfile,
    pub rationality: f64,
    /// `‖x − Q(ϱ u(x))‖∞`.
    pub residual: f64,
    /// Actions each player may use, when solved on a face; `None` means full support.
    pub support: Option<Vec<Vec<usize>>>,
}

/// The quantal response `Q(ϱ u(x))`.
pub fn qre_map(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    x: &MixedProfile,
) -> Result<MixedProfile> {
    let u = game.payoff_vectors(x);
    u.iter()
        .map(|uk| {
            let y: Vec<f64> = uk.iter().map(|v| rho * v).collect();
            entropy.choice(&y)
        })
        .collect::<Result<Vec<_>>>()
        .map(MixedProfile)
}

/// `‖x − Q(ϱ u(x))‖∞`.
pub fn qre_residual(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    x: &MixedProfile,
) -> Result<f64> {
    Ok(x.dist_inf(&qre_map(game, entropy, rho, x)?))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::invalid(format!(
            "rationality must be finite and nonnegative, got {rho}"
        )));
    }
    Ok(())
}

/// Solves for a QRE by damped fixed-point iteration from `init`, with a Newton
/// polish in score space once the iterate is close.
///
/// The damping starts at 0.5, halves whenever the residual grows (down to
/// 1e-3) and grows by 10% after each success, capped at 1.
pub fn qre_solve(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    init: &MixedProfile,
) -> Result<QrePoint> {
    check_rho(rho)?;
    init.validate(game.action_counts())?;
    if !init.is_interior() {
        return Err(Error::domain("initial profile must be interior"));
    }
    if rho == 0.0 {
        return Ok(QrePoint {
            x: MixedProfile::uniform(game.action_counts()),
            rationality: 0.0,
            residual: 0.0,
            support: None,
        });
    }
    let mut x = init.clone();
    let mut r = qre_residual(game, entropy, rho, &x)?;
    let mut s = DAMPING_START;
    let mut polish_at = 1e-6;
    for _ in 0..QRE_MAX_ITERS {
        if r < QRE_TOL {
            break;
        }
        if r < polish_at {
            if let Ok(p) = qre_newton(game, entropy, rho, &x) {
                if p.residual < QRE_TOL && p.x.dist_inf(&x) < 1e3 * r.max(1e-8) {
                    return Ok(p);
                }
            }
            polish_at = r / 100.0;
        }
        let target = qre_map(game, entropy, rho, &x)?;
        let cand = MixedProfile(
            x.0.iter()
                .zip(&target.0)
                .map(|(a, b)| {
                    a.iter()
                        .zip(b)
                        .map(|(u, v)| (1.0 - s) * u + s * v)
                        .collect()
                })
                .collect(),
        );
        let rc = qre_residual(game, entropy, rho, &cand)?;
        if rc > r && s > DAMPING_FLOOR {
            s = (s / 2.0).max(DAMPING_FLOOR);
            continue;
        }
        x = cand;
        r = rc;
        s = (s * 1.1).min(1.0);
    }
    if r < QRE_TOL {
        return Ok(QrePoint {
            x,
            rationality: rho,
            residual: r,
            support: None,
        });
    }
    // The fixed-point iteration cannot reach equilibria that repel it.
    if let Ok(p) = qre_newton(game, entropy, rho, &x) {
        if p.residual < QRE_TOL {
            return Ok(p);
        }
    }
    Err(Error::numerical(
        "QRE fixed-point iteration did not converge",
        r,
        x.flatten(),
    ))
}

/// Newton's method on the score-space field at `T = 1/ϱ` from `init`.
/// Converges to whichever QRE is locally closest, stable or not.
pub fn qre_newton(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    init: &MixedProfile,
) -> Result<QrePoint> {
    check_rho(rho)?;
    if rho == 0.0 {
        return qre_solve(game, entropy, rho, init);
    }
    let spec = DynamicsSpec::new(game, *entropy, 1.0 / rho);
    let z0 = relative_scores(entropy, init)?;
    let (_, x) = newton_rest_point(&spec, &z0)?;
    let residual = qre_residual(game, entropy, rho, &x)?;
    Ok(QrePoint {
        x,
        rationality: rho,
        residual,
        support: None,
    })
}

/// Maximum Newton iterations for rest points.
pub const NEWTON_REST_ITERS: usize = 100;

/// Finds a zero of the score-space field by damped Newton from `z0`.
pub fn newton_rest_point(
    spec: &DynamicsSpec,
    z0: &RelativeScores,
) -> Result<(RelativeScores, MixedProfile)> {
    let dims = z0.dims();
    let mut z = z0.clone();
    let mut x = choice_profile(&spec.entropy, &z)?;
    let mut f = zd_field_at(spec, &z, &x);
    let l2 = |v: &RelativeScores| v.flatten().iter().map(|a| a * a).sum::<f64>().sqrt();
    let span = spec.game.payoff_spans().into_iter().fold(1.0, f64::max);
    for _ in 0..NEWTON_REST_ITERS {
        let scale = span.max(spec.temperature.abs() * z.norm_inf());
        let fnorm = f.norm_inf();
        if fnorm <= 1e-13 * scale {
            return Ok((z, x));
        }
        let jac = zd_jacobian_exact(spec, &x)?;
        let rhs = nalgebra::DVector::from_vec(f.flatten());
        let d = jac
            .lu()
            .solve(&(-rhs))
            .ok_or_else(|| Error::numerical("singular Jacobian", fnorm, x.flatten()))?;
        let f2 = l2(&f);
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-10 {
            let cand = RelativeScores::from_flat(
                &z.flatten()
                    .iter()
                    .zip(d.iter())
                    .map(|(a, b)| a + alpha * b)
                    .collect::<Vec<_>>(),
                &dims,
            );
            if let Ok(xc) = choice_profile(&spec.entropy, &cand) {
                let fc = zd_field_at(spec, &cand, &xc);
                if l2(&fc) < (1.0 - 1e-4 * alpha) * f2 {
                    z = cand;
                    x = xc;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            alpha /= 2.0;
        }
        if !accepted {
            if fnorm <= 1e-10 * scale {
                return Ok((z, x));
            }
            return Err(Error::numerical(
                "Newton line search stalled",
                fnorm,
                z.flatten(),
            ));
        }
    }
    let fnorm = f.norm_inf();
    if fnorm <= 1e-10 * span.max(spec.temperature.abs() * z.norm_inf()) {
        Ok((z, x))
    } else {
        Err(Error::numerical(
            "Newton did not converge",
            fnorm,
            z.flatten(),
        ))
    }
}

/// QRE of the sub-game on `support`, embedded back with zeros off support.
/// Solved from the uniform profile on the face.
pub fn restricted_qre(
    game: &FiniteGame,
    entropy: &Entropy,
    rho: f64,
    support: &[Vec<usize>],
) -> Result<QrePoint> {
    let sub = game.restrict(support)?;
    let init = MixedProfile::uniform(sub.action_counts());
    let p = qre_solve(&sub, entropy, rho, &init)?;
    let x = MixedProfile(
        game.action_counts()
            .iter()
            .zip(support)
            .zip(p.x.blocks())
            .map(|((&n, s), xk)| {
                let mut full = vec![0.0; n];
                for (&a, &v) in s.iter().zip(xk) {
                    full[a] = v;
                }
                full
            })
            .collect(),
    );
    let full_support = support
        .iter()
        .zip(game.action_counts())
        .all(|(s, &n)| s.len() == n);
    Ok(QrePoint {
        x,
        rationality: rho,
        residual: p.residual,
        support: if full_support {
            None
        } else {
            Some(support.to_vec())
        },
    })
}
