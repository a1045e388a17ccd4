//! Legendre kernels of decomposable entropies `h(x) = Σ θ(x_β)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A decomposable entropy kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// `θ(ξ) = ξ log ξ`.
    Gibbs,
    /// `θ(ξ) = −log ξ`.
    Log,
    /// `θ(ξ) = (ξ − ξ^q)/(1 − q)` with `0 < q < 1`.
    Tsallis(f64),
}

impl Kernel {
    /// Tsallis kernel; `q = 1` is the Gibbs kernel.
    pub fn tsallis(q: f64) -> Result<Kernel> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::invalid(format!(
                "tsallis q must lie in (0, 1], got {q}"
            )));
        }
        Ok(if q == 1.0 {
            Kernel::Gibbs
        } else {
            Kernel::Tsallis(q)
        })
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Gibbs => "gibbs".into(),
            Kernel::Log => "log".into(),
            Kernel::Tsallis(q) => format!("tsallis({q})"),
        }
    }

    /// `θ(ξ)`; `+∞` for the log kernel at zero.
    pub fn theta(&self, xi: f64) -> f64 {
        match *self {
            Kernel::Gibbs => {
                if xi > 0.0 {
                    xi * xi.ln()
                } else {
                    0.0
                }
            }
            Kernel::Log => -xi.ln(),
            Kernel::Tsallis(q) => (xi - xi.powf(q)) / (1.0 - q),
        }
    }

    /// `θ′(ξ)`.
    pub fn d1(&self, xi: f64) -> f64 {
        match *self {
            Kernel::Gibbs => 1.0 + xi.ln(),
            Kernel::Log => -1.0 / xi,
            Kernel::Tsallis(q) => (1.0 - q * xi.powf(q - 1.0)) / (1.0 - q),
        }
    }

    /// `θ″(ξ)`.
    pub fn d2(&self, xi: f64) -> f64 {
        match *self {
            Kernel::Gibbs => 1.0 / xi,
            Kernel::Log => 1.0 / (xi * xi),
            Kernel::Tsallis(q) => q * xi.powf(q - 2.0),
        }
    }

    /// `1/θ″(ξ)`, finite down to `ξ = 0`.
    pub fn d2_inverse(&self, xi: f64) -> f64 {
        match *self {
            Kernel::Gibbs => xi,
            Kernel::Log => xi * xi,
            Kernel::Tsallis(q) => xi.powf(2.0 - q) / q,
        }
    }

    /// `θ′(ξ)/θ″(ξ)`, extended by continuity to `ξ = 0`.
    pub fn d1_over_d2(&self, xi: f64) -> f64 {
        match *self {
            Kernel::Gibbs => {
                if xi > 0.0 {
                    xi * (1.0 + xi.ln())
                } else {
                    0.0
                }
            }
            Kernel::Log => -xi,
            Kernel::Tsallis(q) => (xi.powf(2.0 - q) - q * xi) / (q * (1.0 - q)),
        }
    }

    /// Inverse of `θ′`; returns 0 where the argument lies below the range
    /// reachable in floating point.
    pub fn d1_inverse(&self, s: f64) -> f64 {
        match *self {
            Kernel::Gibbs => (s - 1.0).exp(),
            Kernel::Log => -1.0 / s,
            Kernel::Tsallis(q) => ((1.0 - (1.0 - q) * s) / q).powf(1.0 / (q - 1.0)),
        }
    }

    /// Supremum of `θ′` over `(0, ∞)`; the inverse is defined below it.
    pub fn d1_sup(&self) -> f64 {
        match *self {
            Kernel::Gibbs => f64::INFINITY,
            Kernel::Log => 0.0,
            Kernel::Tsallis(q) => 1.0 / (1.0 - q),
        }
    }

    /// Whether the induced entropy restricts to an entropy on every face.
    pub fn regular(&self) -> bool {
        !matches!(self, Kernel::Log)
    }

    /// `m` with `ξ θ″(ξ) ≥ m` on `(0, 1)`.
    pub fn lower_bound_m(&self) -> f64 {
        match *self {
            Kernel::Gibbs | Kernel::Log => 1.0,
            Kernel::Tsallis(q) => q,
        }
    }

    /// `sup |θ′(ξ)/θ″(ξ)|` over `(0, 1)`.
    pub fn ratio_bound(&self) -> f64 {
        match *self {
            Kernel::Gibbs | Kernel::Log => 1.0,
            Kernel::Tsallis(q) => 1.0 / q,
        }
    }

    /// `max θ″` on `[1/n, 1]`; every kernel here has decreasing `θ″`.
    pub fn d2_max_on(&self, n: usize) -> f64 {
        self.d2(1.0 / n as f64)
    }
}
