//! One strategy-space update and the step ceiling that keeps it on the simplex.

use crate::entropy::{Entropy, Kernel};
use crate::error::{Error, Result};

/// Score-based increment of the chosen action: `γ (û − T y_â) / x_â`.
pub fn score_increment(temperature: f64, gamma: f64, score: f64, prob: f64, payoff: f64) -> f64 {
    gamma * (payoff - temperature * score) / prob
}

/// Increment of one player's mixed strategy `x` after playing `action` and
/// observing the (nonnegative) payoff estimate `payoff`, written to `out`.
///
/// Each coordinate moves by
/// `γ/θ″(x_α) · [û/x_â · (1{â = α} − Θ_h/θ″(x_â)) − T g_α]` with
/// `g_α = θ′(x_α) − Θ_h Σ_β θ′(x_β)/θ″(x_β)` and `Θ_h = (Σ_β 1/θ″(x_β))⁻¹`.
/// The increments sum to zero up to rounding.
pub fn strategy_increment(
    kernel: Kernel,
    temperature: f64,
    gamma: f64,
    x: &[f64],
    action: usize,
    payoff: f64,
    out: &mut [f64],
) {
    let mut inv_sum = 0.0;
    let mut ratio_sum = 0.0;
    for &v in x {
        inv_sum += kernel.d2_inverse(v);
        ratio_sum += kernel.d1_over_d2(v);
    }
    let theta_h = 1.0 / inv_sum;
    let base = payoff / x[action];
    let own = theta_h * kernel.d2_inverse(x[action]);
    for (i, o) in out.iter_mut().enumerate() {
        let inv = kernel.d2_inverse(x[i]);
        let hit = if i == action { 1.0 } else { 0.0 };
        let drift = kernel.d1_over_d2(x[i]) - inv * theta_h * ratio_sum;
        *o = gamma * (inv * base * (hit - own) - temperature * drift);
    }
}

/// The Gibbs kernel form of [`strategy_increment`]:
/// `γ[(1{â = α} − x_α) û − T x_α (log x_α − Σ_β x_β log x_β)]`.
pub fn gibbs_increment(
    temperature: f64,
    gamma: f64,
    x: &[f64],
    action: usize,
    payoff: f64,
    out: &mut [f64],
) {
    let xlogx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    let h: f64 = x.iter().map(|&v| xlogx(v)).sum();
    for (i, o) in out.iter_mut().enumerate() {
        let hit = if i == action { 1.0 } else { 0.0 };
        let v = x[i];
        let entropy_term = if v > 0.0 { v * (v.ln() - h) } else { 0.0 };
        *o = gamma * ((hit - v) * payoff - temperature * entropy_term);
    }
}

/// `B = m⁻¹(T C_θ + m⁻¹ Θ″_max û_max)` with `C_θ = θ′(1) + Θ″_max |𝒜| M`,
/// bounding the relative decrement `−Δx_α / (γ x_α)` of any coordinate.
pub fn decrement_bound(
    kernel: Kernel,
    temperature: f64,
    action_count: usize,
    payoff_max: f64,
) -> f64 {
    let m = kernel.lower_bound_m();
    let big_m = kernel.ratio_bound();
    let d2_max = kernel.d2_max_on(action_count);
    let c = kernel.d1(1.0) + d2_max * action_count as f64 * big_m;
    (temperature * c + d2_max * payoff_max / m) / m
}

fn check_bound_args(temperature: f64, action_count: usize, payoff_max: f64) -> Result<()> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::invalid(format!(
            "step bound needs a nonnegative temperature, got {temperature}"
        )));
    }
    if action_count == 0 {
        return Err(Error::invalid("action count must be positive"));
    }
    if !(payoff_max > 0.0 && payoff_max.is_finite()) {
        return Err(Error::invalid("payoff ceiling must be positive"));
    }
    Ok(())
}

/// Largest step keeping every coordinate nonnegative after one update with
/// payoff estimates in `[0, payoff_max]`.
///
/// For the Gibbs kernel this is the sharper certificate
/// `γ (û_max + T log|𝒜|) ≤ 1`; other kernels use `1/B` from
/// [`decrement_bound`].
pub fn step_bound_for_payoffs(
    entropy: &Entropy,
    temperature: f64,
    action_count: usize,
    payoff_max: f64,
) -> Result<f64> {
    check_bound_args(temperature, action_count, payoff_max)?;
    let kernel = entropy.kernel().ok_or_else(|| {
        Error::Unsupported(format!("{} has no kernel constant m", entropy.name()))
    })?;
    Ok(match kernel {
        Kernel::Gibbs => 1.0 / (payoff_max + temperature * (action_count as f64).ln()),
        k => 1.0 / decrement_bound(k, temperature, action_count, payoff_max),
    })
}

/// [`step_bound_for_payoffs`] with payoffs in `[0, 1]`.
pub fn step_bound(entropy: &Entropy, temperature: f64, action_count: usize) -> Result<f64> {
    step_bound_for_payoffs(entropy, temperature, action_count, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gibbs_forms_agree() {
        let x = [0.2, 0.5, 0.3];
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        strategy_increment(Kernel::Gibbs, 0.3, 0.1, &x, 1, 0.7, &mut a);
        gibbs_increment(0.3, 0.1, &x, 1, 0.7, &mut b);
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-15);
        }
        assert!(a.iter().sum::<f64>().abs() < 1e-16);
    }

    #[test]
    fn gibbs_certificate() {
        let g = step_bound(&Entropy::gibbs(), 0.2, 2).unwrap();
        assert!((g * (1.0 + 0.2 * 2f64.ln()) - 1.0).abs() < 1e-15);
        assert!(step_bound(&Entropy::renyi(0.5).unwrap(), 0.2, 2).is_err());
    }

    #[test]
    fn zero_temperature_limit_is_payoff_term() {
        let k = Kernel::Tsallis(0.5);
        let b = decrement_bound(k, 0.0, 3, 1.0);
        assert!((b - k.d2_max_on(3) / 0.25).abs() < 1e-12);
    }
}
