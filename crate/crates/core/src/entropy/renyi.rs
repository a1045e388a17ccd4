//! The Rényi entropy `h(x) = (q − 1)⁻¹ log Σ x_β^q`, which is not decomposable.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Renyi {
    q: f64,
}

impl Renyi {
    /// Requires `0 < q < 1`; `q = 1` is the Gibbs entropy and is handled as a kernel.
    pub fn new(q: f64) -> Result<Renyi> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(format!(
                "renyi q must lie in (0, 1), got {q}"
            )));
        }
        Ok(Renyi { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn power_sum(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.powf(self.q)).sum()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.power_sum(x).ln() / (self.q - 1.0)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let q = self.q;
        let s = self.power_sum(x);
        x.iter()
            .map(|v| q * v.powf(q - 1.0) / ((q - 1.0) * s))
            .collect()
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let q = self.q;
        let s = self.power_sum(x);
        let n = x.len();
        let p: Vec<f64> = x.iter().map(|v| v.powf(q - 1.0)).collect();
        DMatrix::from_fn(n, n, |a, b| {
            let rank_one = q * q * p[a] * p[b] / ((1.0 - q) * s * s);
            if a == b {
                q * x[a].powf(q - 2.0) / s + rank_one
            } else {
                rank_one
            }
        })
    }
}
