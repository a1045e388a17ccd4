//! Step-size sequences `γ_n`, indexed from `n = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepSchedule {
    /// `c/n`.
    Harmonic { c: f64 },
    /// `c/(a + n^b)` with `b ∈ (1/2, 1]`.
    ShiftedPower {
        c: f64,
        #[serde(default)]
        a: f64,
        b: f64,
    },
    /// `c` at every step; never converges in the stochastic approximation sense.
    Constant { c: f64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        let c = match *self {
            StepSchedule::Harmonic { c } | StepSchedule::Constant { c } => c,
            StepSchedule::ShiftedPower { c, a, b } => {
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(Error::invalid(format!(
                        "schedule offset a must be >= 0, got {a}"
                    )));
                }
                if !(b > 0.5 && b <= 1.0) {
                    return Err(Error::invalid(format!(
                        "schedule exponent b must lie in (0.5, 1], got {b}"
                    )));
                }
                c
            }
        };
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!(
                "schedule scale c must be positive, got {c}"
            )));
        }
        Ok(())
    }

    /// `γ_n` for `n ≥ 1`.
    pub fn step(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        match *self {
            StepSchedule::Harmonic { c } => c / n,
            StepSchedule::ShiftedPower { c, a, b } => c / (a + n.powf(b)),
            StepSchedule::Constant { c } => c,
        }
    }

    /// Largest step; every schedule is non-increasing.
    pub fn max_step(&self) -> f64 {
        self.step(1)
    }

    /// Square-summable but not summable.
    pub fn is_convergent(&self) -> bool {
        !matches!(self, StepSchedule::Constant { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let s = StepSchedule::ShiftedPower {
            c: 1.0,
            a: 5.0,
            b: 0.6,
        };
        s.validate().unwrap();
        assert_eq!(s.step(1), 1.0 / 6.0);
        assert!((s.step(32) - 1.0 / (5.0 + 8.0)).abs() < 1e-15);
        assert_eq!(StepSchedule::Harmonic { c: 2.0 }.step(4), 0.5);
        assert!(!StepSchedule::Constant { c: 0.1 }.is_convergent());
        assert!(StepSchedule::ShiftedPower {
            c: 1.0,
            a: 0.0,
            b: 0.5
        }
        .validate()
        .is_err());
    }

    #[test]
    fn parses_config_form() {
        let s: StepSchedule =
            serde_json::from_str(r#"{"kind":"shifted-power","c":1,"a":5,"b":0.6}"#).unwrap();
        assert_eq!(
            s,
            StepSchedule::ShiftedPower {
                c: 1.0,
                a: 5.0,
                b: 0.6
            }
        );
    }
}
