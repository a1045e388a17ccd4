//! Generalized entropy functions and their choice maps.
//!
//! An entropy `h` on the simplex induces the choice map
//! `Q(y) = argmax_x { Σ x_β y_β − h(x) }` and the free entropy
//! `h*(y) = max_x { Σ x_β y_β − h(x) }`, with `Q = ∇h*`.
//!
//! Reduced coordinates drop action 0: an interior point is `w = (x_1, …)` with
//! `x_0 = 1 − Σ w`, and relative scores are `z_μ = ∂h/∂x_μ − ∂h/∂x_0`.
//!
//! ```
//! use entrodyn::entropy::Entropy;
//!
//! let x = Entropy::gibbs().choice(&[2f64.ln(), 0.0]).unwrap();
//! assert!((x[0] - 2.0 / 3.0).abs() < 1e-15);
//! ```

mod choice;
mod hessian;
mod kernel;
mod renyi;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use choice::{gibbs_map, log_sum_exp, INTERIOR_FLOOR, NEWTON_MAX_ITERS, NEWTON_TOL};
pub use hessian::{harmonic_aggregate, kernel_reduced, kernel_reduced_inverse, reduce};
pub use kernel::Kernel;
pub use renyi::Renyi;

/// An entropy model: either decomposable with a kernel, or the Rényi entropy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Entropy {
    Kernel(Kernel),
    Renyi(Renyi),
}

impl Entropy {
    pub fn gibbs() -> Entropy {
        Entropy::Kernel(Kernel::Gibbs)
    }

    pub fn log() -> Entropy {
        Entropy::Kernel(Kernel::Log)
    }

    pub fn tsallis(q: f64) -> Result<Entropy> {
        Kernel::tsallis(q).map(Entropy::Kernel)
    }

    /// Rényi entropy; `q = 1` gives the Gibbs kernel.
    pub fn renyi(q: f64) -> Result<Entropy> {
        if q == 1.0 {
            return Ok(Entropy::gibbs());
        }
        Renyi::new(q).map(Entropy::Renyi)
    }

    pub fn name(&self) -> String {
        match self {
            Entropy::Kernel(k) => k.name(),
            Entropy::Renyi(r) => format!("renyi({})", r.q()),
        }
    }

    pub fn kernel(&self) -> Option<Kernel> {
        match self {
            Entropy::Kernel(k) => Some(*k),
            Entropy::Renyi(_) => None,
        }
    }

    pub fn is_gibbs(&self) -> bool {
        matches!(self, Entropy::Kernel(Kernel::Gibbs))
    }

    pub fn regular(&self) -> bool {
        match self {
            Entropy::Kernel(k) => k.regular(),
            Entropy::Renyi(_) => true,
        }
    }

    /// `h(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Entropy::Kernel(k) => x.iter().map(|&v| k.theta(v)).sum(),
            Entropy::Renyi(r) => r.value(x),
        }
    }

    /// Full gradient `∂h/∂x_α`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Entropy::Kernel(k) => x.iter().map(|&v| k.d1(v)).collect(),
            Entropy::Renyi(r) => r.gradient(x),
        }
    }

    /// Full Hessian `∂²h/∂x_α∂x_β`.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            Entropy::Kernel(k) => DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                x.len(),
                x.iter().map(|&v| k.d2(v)),
            )),
            Entropy::Renyi(r) => r.hessian(x),
        }
    }

    /// The choice map `Q(y)`. Kernels use a one-dimensional multiplier solve;
    /// the Rényi entropy uses the variational Newton solver.
    pub fn choice(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.is_empty() {
            return Err(Error::invalid("empty score vector"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("scores must be finite"));
        }
        match self {
            Entropy::Kernel(k) => Ok(choice::kernel_choice(*k, y)),
            Entropy::Renyi(_) => choice::variational_choice(self, y),
        }
    }

    /// The choice map computed by damped Newton on the variational problem,
    /// whatever the entropy.
    pub fn choice_variational(&self, y: &[f64]) -> Result<Vec<f64>> {
        choice::variational_choice(self, y)
    }

    /// The choice map from relative scores `z` (benchmark score zero).
    pub fn choice_relative(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut y = Vec::with_capacity(z.len() + 1);
        y.push(0.0);
        y.extend_from_slice(z);
        self.choice(&y)
    }

    /// Free entropy `h*(y) = Σ Q(y)_β y_β − h(Q(y))`.
    pub fn free_entropy(&self, y: &[f64]) -> Result<f64> {
        if self.is_gibbs() {
            return Ok(log_sum_exp(y));
        }
        let x = self.choice(y)?;
        Ok(x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - self.value(&x))
    }

    /// Relative scores `z_μ = ∂h/∂x_μ − ∂h/∂x_0` of an interior point `x`.
    pub fn relative_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_interior(x)?;
        let g = self.gradient(x);
        Ok(g[1..].iter().map(|v| v - g[0]).collect())
    }

    /// `F₀(w) = ∇h₀(w)` for a reduced interior point `w`.
    pub fn reduced_gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.relative_scores(&full_from_reduced(w)?)
    }

    /// Reduced Hessian at a full interior point `x`.
    pub fn hessian_reduced_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_interior(x)?;
        Ok(match self {
            Entropy::Kernel(k) => {
                let q: Vec<f64> = x.iter().map(|&v| k.d2(v)).collect();
                kernel_reduced(&q)
            }
            Entropy::Renyi(r) => reduce(&r.hessian(x)),
        })
    }

    /// Inverse reduced Hessian at a full interior point `x`: closed form for
    /// kernels, dense inversion otherwise.
    pub fn hessian_inverse_reduced_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_interior(x)?;
        match self {
            Entropy::Kernel(k) => {
                let q: Vec<f64> = x.iter().map(|&v| k.d2(v)).collect();
                Ok(kernel_reduced_inverse(&q))
            }
            Entropy::Renyi(r) => reduce(&r.hessian(x)).try_inverse().ok_or_else(|| {
                Error::numerical("reduced Hessian is singular", f64::NAN, x.to_vec())
            }),
        }
    }

    /// Reduced Hessian `h_{μν}` at a reduced interior point `w`.
    pub fn hessian_reduced(&self, w: &[f64]) -> Result<DMatrix<f64>> {
        self.hessian_reduced_at(&full_from_reduced(w)?)
    }

    /// Inverse reduced Hessian `h^{μν}` at a reduced interior point `w`.
    pub fn hessian_inverse_reduced(&self, w: &[f64]) -> Result<DMatrix<f64>> {
        self.hessian_inverse_reduced_at(&full_from_reduced(w)?)
    }
}

/// Full point `(1 − Σ w, w)` from a reduced interior point.
pub fn full_from_reduced(w: &[f64]) -> Result<Vec<f64>> {
    let x = choice::full_from_reduced(w);
    check_interior(&x)?;
    Ok(x)
}

fn check_interior(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::domain("empty point"));
    }
    if x.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "point {x:?} is not in the open simplex"
        )))
    }
}

/// Entropy as written in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl EntropySpec {
    pub fn build(&self) -> Result<Entropy> {
        let need_q = |name: &str| {
            self.q
                .ok_or_else(|| Error::Config(format!("{name} entropy needs `q`")))
        };
        let e = match (self.kernel.as_deref(), self.general.as_deref()) {
            (Some("gibbs"), None) => Entropy::gibbs(),
            (Some("log"), None) => Entropy::log(),
            (Some("tsallis"), None) => Entropy::tsallis(need_q("tsallis")?)?,
            (None, Some("renyi")) => Entropy::renyi(need_q("renyi")?)?,
            (Some(k), None) => return Err(Error::Config(format!("unknown kernel `{k}`"))),
            (None, Some(g)) => return Err(Error::Config(format!("unknown general entropy `{g}`"))),
            _ => {
                return Err(Error::Config(
                    "entropy needs exactly one of `kernel` or `general`".into(),
                ))
            }
        };
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gibbs_examples() {
        let x = gibbs_map(&[0.0, 0.0, 0.0]);
        assert!(x.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        let x = gibbs_map(&[1e4, 0.0, -1e4]);
        assert_eq!(x[0], 1.0);
    }

    #[test]
    fn kernel_path_matches_variational() {
        for e in [
            Entropy::gibbs(),
            Entropy::log(),
            Entropy::tsallis(0.5).unwrap(),
        ] {
            let y = [0.3, -1.2, 2.0, 0.0];
            let a = e.choice(&y).unwrap();
            let b = e.choice_variational(&y).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-10, "{}: {a:?} vs {b:?}", e.name());
            }
        }
    }

    #[test]
    fn renyi_handles_large_scores() {
        let e = Entropy::renyi(0.5).unwrap();
        for y in [[1e4, 0.0, -3.0], [-1e4, 0.0, 5.0], [0.0, 0.0, 0.0]] {
            let x = e.choice(&y).unwrap();
            assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(x.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn spec_parsing() {
        let s: EntropySpec = serde_json::from_str(r#"{"kernel":"tsallis","q":0.7}"#).unwrap();
        assert_eq!(s.build().unwrap(), Entropy::tsallis(0.7).unwrap());
        let s: EntropySpec = serde_json::from_str(r#"{"general":"renyi","q":0.5}"#).unwrap();
        assert!(matches!(s.build().unwrap(), Entropy::Renyi(_)));
        let s: EntropySpec = serde_json::from_str(r#"{"kernel":"tsallis","q":1.5}"#).unwrap();
        assert!(s.build().is_err());
        let s: EntropySpec = serde_json::from_str(r#"{"kernel":"tsallis"}"#).unwrap();
        assert!(s.build().is_err());
    }

    #[test]
    fn domain_errors() {
        let e = Entropy::gibbs();
        assert!(matches!(e.reduced_gradient(&[1.0]), Err(Error::Domain(_))));
        assert!(matches!(
            e.hessian_reduced(&[0.0, 0.5]),
            Err(Error::Domain(_))
        ));
    }
}
