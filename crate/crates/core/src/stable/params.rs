use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::StableError;

/// Half-width of the band around `alpha = 1` evaluated with the `alpha = 1`
/// branch, away from the `tan(pi alpha / 2)` pole.
pub const UNIT_ALPHA_EPS: f64 = 1e-6;

/// Alpha-stable law in the S1 parameterisation:
/// `log phi(t) = i mu t - gamma^alpha |t|^alpha [1 - i beta sign(t) tan(pi alpha / 2)]`,
/// with the usual `2/pi beta sign(t) ln|t|` branch at `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl fmt::Display for StableParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S1(alpha={}, beta={}, gamma={}, mu={})",
            self.alpha, self.beta, self.gamma, self.mu
        )
    }
}

pub(crate) fn is_unit_alpha(alpha: f64) -> bool {
    (alpha - 1.0).abs() < UNIT_ALPHA_EPS
}

/// `Z1 - Z0` for standard S1 and S0 variables with the same `(alpha, beta)`.
pub(crate) fn s0_shift(alpha: f64, beta: f64) -> f64 {
    if is_unit_alpha(alpha) {
        0.0
    } else {
        beta * (0.5 * PI * alpha).tan()
    }
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, mu: f64) -> Result<Self, StableError> {
        let p = Self {
            alpha,
            beta,
            gamma,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn standard(alpha: f64, beta: f64) -> Result<Self, StableError> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<(), StableError> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(StableError::InvalidParams(format!(
                "alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(StableError::InvalidParams(format!(
                "beta must lie in [-1, 1], got {}",
                self.beta
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(StableError::InvalidParams(format!(
                "gamma must be positive and finite, got {}",
                self.gamma
            )));
        }
        if !self.mu.is_finite() {
            return Err(StableError::InvalidParams(format!("mu must be finite, got {}", self.mu)));
        }
        Ok(())
    }

    pub fn is_unit_alpha(&self) -> bool {
        is_unit_alpha(self.alpha)
    }

    /// `c` in `X = gamma Z + c`, `Z` standard S1 with the same `(alpha, beta)`.
    pub fn standard_offset(&self) -> f64 {
        if self.is_unit_alpha() {
            self.mu + 2.0 / PI * self.beta * self.gamma * self.gamma.ln()
        } else {
            self.mu
        }
    }

    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.standard_offset()) / self.gamma
    }

    /// Location in the S0 parameterisation (continuous in alpha).
    pub fn s0_location(&self) -> f64 {
        self.standard_offset() + self.gamma * s0_shift(self.alpha, self.beta)
    }

    /// Inverse of [`StableParams::s0_location`].
    pub fn from_s0(alpha: f64, beta: f64, gamma: f64, delta0: f64) -> Result<Self, StableError> {
        let mu = if is_unit_alpha(alpha) {
            delta0 - 2.0 / PI * beta * gamma * gamma.ln()
        } else {
            delta0 - beta * gamma * s0_shift(alpha, 1.0)
        };
        Self::new(alpha, beta, gamma, mu)
    }

    /// Law of `a X + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self, StableError> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(StableError::InvalidParams(format!(
                "affine map needs finite non-zero scale, got a={a}, b={b}"
            )));
        }
        let beta = self.beta * a.signum();
        let gamma = self.gamma * a.abs();
        let mu = if self.is_unit_alpha() {
            a * self.mu + b - 2.0 / PI * self.beta * self.gamma * a * a.abs().ln()
        } else {
            a * self.mu + b
        };
        Self::new(self.alpha, beta, gamma, mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_ranges() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.0001, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.2, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 1.0, f64::NAN).is_err());
        assert!(StableParams::new(2.0, -1.0, 3.0, -4.0).is_ok());
    }

    #[test]
    fn s0_round_trip() {
        for &(a, b, g, m) in &[(1.64, 0.219, 0.00815, -0.000186), (1.0, 0.5, 2.5, 1.0), (0.8, -0.3, 0.2, 3.0)] {
            let p = StableParams::new(a, b, g, m).unwrap();
            let q = StableParams::from_s0(a, b, g, p.s0_location()).unwrap();
            assert!((q.mu - m).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_composes() {
        let p = StableParams::new(1.0, 0.4, 2.0, 0.3).unwrap();
        let q = p.affine(-3.0, 1.0).unwrap().affine(-1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((q.mu - p.mu).abs() < 1e-12 && (q.gamma - p.gamma).abs() < 1e-12);
        assert_eq!(q.beta, p.beta);
    }
}
