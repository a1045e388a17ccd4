//! Choice maps: the Gibbs map, the kernel fast path and a generic damped
//! Newton solver for the variational problem `max Σ x_β y_β − h(x)`.

use nalgebra::DVector;

use super::kernel::Kernel;
use super::Entropy;
use crate::error::{Error, Result};

/// Maximum Newton iterations of the variational solver.
pub const NEWTON_MAX_ITERS: usize = 200;
/// Gradient tolerance of the variational solver, relative to `max(1, |z|∞)`.
pub const NEWTON_TOL: f64 = 1e-12;
/// Coordinates are never allowed to drop below this during the Newton solve.
pub const INTERIOR_FLOOR: f64 = 1e-300;

/// Softmax with max-shift.
pub fn gibbs_map(y: &[f64]) -> Vec<f64> {
    let m = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = y.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// `log Σ exp(y_β)` with max-shift.
pub fn log_sum_exp(y: &[f64]) -> f64 {
    let m = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + y.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Solves `θ′(x_α) = y_α − λ`, `Σ x_α = 1` for the multiplier by Newton's
/// method on `t = max y − λ`, started from the right end of the bracket
/// `[θ′(1/n), θ′(1)]` where the convex residual makes Newton monotone.
pub(crate) fn kernel_choice(kernel: Kernel, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n == 1 {
        return vec![1.0];
    }
    if kernel == Kernel::Gibbs {
        return gibbs_map(y);
    }
    let m = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: Vec<f64> = y.iter().map(|v| v - m).collect();
    let lo = kernel.d1(1.0 / n as f64);
    let mut t = kernel.d1(1.0);
    for _ in 0..200 {
        let mut g = -1.0;
        let mut dg = 0.0;
        for &sa in &s {
            let x = kernel.d1_inverse(t + sa);
            g += x;
            if x > 0.0 {
                dg += 1.0 / kernel.d2(x);
            }
        }
        if g <= 0.0 || dg <= 0.0 {
            break;
        }
        let step = g / dg;
        let next = (t - step).max(lo);
        if (t - next).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            t = next;
            break;
        }
        t = next;
    }
    let mut x: Vec<f64> = s.iter().map(|&sa| kernel.d1_inverse(t + sa)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x
}

pub(crate) fn full_from_reduced(w: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(w.len() + 1);
    x.push(1.0 - w.iter().sum::<f64>());
    x.extend_from_slice(w);
    x
}

fn objective(entropy: &Entropy, x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - entropy.value(x)
}

fn reduced_residual(entropy: &Entropy, x: &[f64], z: &[f64]) -> DVector<f64> {
    let g = entropy.gradient(x);
    DVector::from_iterator(
        z.len(),
        z.iter().enumerate().map(|(m, zm)| zm - (g[m + 1] - g[0])),
    )
}

/// Generic variational choice map via damped Newton in reduced coordinates.
///
/// The eliminated coordinate is the highest-scoring action, so it stays
/// bounded below by `1/n` and `1 − Σ w` loses no precision.
pub(crate) fn variational_choice(entropy: &Entropy, y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    let top = (0..n).fold(0, |b, i| if y[i] > y[b] { i } else { b });
    let mut yp = y.to_vec();
    yp.swap(0, top);
    let mut x = solve_reduced(entropy, &yp)?;
    x.swap(0, top);
    Ok(x)
}

fn solve_reduced(entropy: &Entropy, y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    let z: Vec<f64> = y[1..].iter().map(|v| v - y[0]).collect();
    let zscale = z.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let tol = NEWTON_TOL * zscale;

    let mut x = vec![1.0 / n as f64; n];
    let mut r = reduced_residual(entropy, &x, &z);
    let mut rn = r.amax();
    for _ in 0..NEWTON_MAX_ITERS {
        if rn <= tol {
            return Ok(x);
        }
        let h = super::hessian::reduce(&entropy.hessian(&x));
        let d = match h.clone().cholesky() {
            Some(c) => c.solve(&r),
            None => h
                .lu()
                .solve(&r)
                .ok_or_else(|| Error::numerical("singular Hessian in choice map", rn, x.clone()))?,
        };
        // Largest step keeping every coordinate a fixed fraction inside.
        let mut alpha: f64 = 1.0;
        for (m, dm) in d.iter().enumerate() {
            if *dm < 0.0 {
                alpha = alpha.min(0.99 * x[m + 1] / -dm);
            }
        }
        let dsum: f64 = d.iter().sum();
        if dsum > 0.0 {
            alpha = alpha.min(0.99 * x[0] / dsum);
        }
        let f0 = objective(entropy, &x, y);
        let slope = r.dot(&d);
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand = x.clone();
            for (m, dm) in d.iter().enumerate() {
                cand[m + 1] += alpha * dm;
            }
            cand[0] = 1.0 - cand[1..].iter().sum::<f64>();
            if cand.iter().all(|&v| v >= INTERIOR_FLOOR) {
                let f1 = objective(entropy, &cand, y);
                let r1 = reduced_residual(entropy, &cand, &z);
                let r1n = r1.amax();
                if r1n.is_finite() && (f1 >= f0 + 1e-4 * alpha * slope || r1n < rn) {
                    x = cand;
                    r = r1;
                    rn = r1n;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if rn <= tol {
        Ok(x)
    } else {
        Err(Error::numerical(
            "choice map Newton solve did not converge",
            rn,
            x,
        ))
    }
}
