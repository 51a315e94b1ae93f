//! Normal-inverse-Gaussian laws.
//!
//! The NIG law is the `lambda = -1/2` member of the generalized hyperbolic
//! family, whose density is
//!
//! ```text
//! f_GH(x) = kappa * (delta^2 + (x - mu)^2)^((lambda - 1/2) / 2)
//!           * K_{lambda - 1/2}(alpha sqrt(delta^2 + (x - mu)^2)) * exp(beta (x - mu)),
//! kappa   = (alpha^2 - beta^2)^(lambda / 2)
//!           / (sqrt(2 pi) alpha^(lambda - 1/2) delta^lambda K_lambda(delta sqrt(alpha^2 - beta^2))).
//! ```
//!
//! At `lambda = -1/2`, with `K_{-1} = K_1` and `K_{-1/2}(z) = sqrt(pi / 2z) e^{-z}`,
//! this reduces to
//! `f(x) = (alpha delta / pi) exp(delta gamma + beta (x - mu)) K_1(alpha r) / r`,
//! `r = sqrt(delta^2 + (x - mu)^2)`, `gamma = sqrt(alpha^2 - beta^2)`.
//! Only this member is implemented.

mod fit;
mod sample;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    bessel_k_scaled, integrate_with_breaks, Integral, BesselOrder, NumericsError,
    QuadratureSpec,
};

pub use fit::{moment_start, nig_fit_mle, NigFitResult};
pub use sample::nig_sample;

#[derive(Debug, Error)]
pub enum NigError {
    #[error("invalid NIG parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("data series is empty")]
    EmptyData,
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
}

impl std::fmt::Display for NigParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "NIG(alpha={}, beta={}, delta={}, mu={})",
            self.alpha, self.beta, self.delta, self.mu
        )
    }
}

impl NigParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, mu: f64) -> Result<Self, NigError> {
        let p = Self {
            alpha,
            beta,
            delta,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), NigError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(NigError::InvalidParams(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta.abs() < self.alpha) {
            return Err(NigError::InvalidParams(format!(
                "|beta| must be below alpha, got beta={} alpha={}",
                self.beta, self.alpha
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(NigError::InvalidParams(format!("delta must be positive, got {}", self.delta)));
        }
        if !self.mu.is_finite() {
            return Err(NigError::InvalidParams(format!("mu must be finite, got {}", self.mu)));
        }
        Ok(())
    }

    /// `sqrt(alpha^2 - beta^2)`.
    pub fn gamma(&self) -> f64 {
        ((self.alpha - self.beta) * (self.alpha + self.beta)).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.mu + self.delta * self.beta / self.gamma()
    }

    pub fn variance(&self) -> f64 {
        self.delta * self.alpha * self.alpha / self.gamma().powi(3)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn skewness(&self) -> f64 {
        3.0 * self.beta / (self.alpha * (self.delta * self.gamma()).sqrt())
    }

    /// Pearson (non-excess) kurtosis.
    pub fn kurtosis(&self) -> f64 {
        let rho = self.beta / self.alpha;
        3.0 + 3.0 * (1.0 + 4.0 * rho * rho) / (self.delta * self.gamma())
    }

    /// Law of `a X + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self, NigError> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(NigError::InvalidParams(format!(
                "affine map needs finite non-zero scale, got a={a}, b={b}"
            )));
        }
        Self::new(self.alpha / a.abs(), self.beta / a, self.delta * a.abs(), a * self.mu + b)
    }

    /// Decay rate of the slower exponential tail.
    fn tail_rate(&self) -> f64 {
        self.alpha - self.beta.abs()
    }
}

/// `ln f(x)`, evaluated without forming `K_1` or the exponentials.
pub fn nig_ln_pdf(x: f64, p: &NigParams) -> Result<f64, NigError> {
    p.validate()?;
    if !x.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ln_pdf_unchecked(x, p)?)
}

pub(crate) fn ln_pdf_unchecked(x: f64, p: &NigParams) -> Result<f64, NumericsError> {
    let d = x - p.mu;
    let r = p.delta.hypot(d);
    let g = p.gamma();
    // delta gamma - alpha r, with the cancellations done algebraically.
    let exponent = -p.delta * p.beta * p.beta / (g + p.alpha) - p.alpha * d * d / (p.delta + r);
    let k1 = bessel_k_scaled(BesselOrder::One, p.alpha * r)?;
    Ok((p.alpha * p.delta / PI).ln() + exponent + p.beta * d + k1.ln() - r.ln())
}

pub fn nig_pdf(x: f64, p: &NigParams) -> Result<f64, NigError> {
    Ok(nig_ln_pdf(x, p)?.exp())
}

/// Error bound accepted when rounding in the density stops the quadrature
/// from reaching its nominal target, as happens for very large `alpha`.
const SETTLED_ABS_ERROR: f64 = 1e-10;

fn settle(r: Result<Integral, NumericsError>) -> Result<f64, NumericsError> {
    match r {
        Ok(v) => Ok(v.value),
        Err(NumericsError::NonConvergence { estimate, abs_error }) if abs_error <= SETTLED_ABS_ERROR => Ok(estimate),
        Err(e) => Err(e),
    }
}

fn cdf_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_subdivisions: 20_000,
    }
}

/// `P(X < x)` for `x` at or below the mean, or `P(X > x)` for `upper`.
fn tail_mass(x: f64, p: &NigParams, upper: bool) -> Result<f64, NigError> {
    // y = x -/+ s (1 - t) / t maps t in (0, 1] onto the tail.
    let s = p.std_dev().min(1.0 / p.tail_rate()).max(1e-300);
    let dir = if upper { 1.0 } else { -1.0 };
    let mut breaks = vec![0.0];
    for u in [1024.0, 256.0, 64.0, 16.0, 4.0, 1.0, 0.25] {
        breaks.push(1.0 / (1.0 + u));
    }
    breaks.push(1.0);
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let y = x + dir * s * (1.0 - t) / t;
        ln_pdf_unchecked(y, p).map_or(0.0, |l| l.exp() * s / (t * t))
    };
    let v = settle(integrate_with_breaks(integrand, &breaks, &cdf_spec()))?;
    Ok(v.clamp(0.0, 1.0))
}

/// Distribution function.
pub fn nig_cdf(x: f64, p: &NigParams) -> Result<f64, NigError> {
    p.validate()?;
    if x.is_nan() {
        return Err(NigError::InvalidParams("nig_cdf evaluated at NaN".into()));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if x <= p.mean() {
        tail_mass(x, p, false)
    } else {
        Ok(1.0 - tail_mass(x, p, true)?)
    }
}

/// Distribution function at every point of an ascending slice, accumulating
/// integrals between neighbours outward from the mean.
pub fn nig_cdf_sorted(sorted: &[f64], p: &NigParams) -> Result<Vec<f64>, NigError> {
    p.validate()?;
    let n = sorted.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return Ok(out);
    }
    let spec = QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        max_subdivisions: 2_000,
    };
    let dens = |y: f64| ln_pdf_unchecked(y, p).map_or(0.0, f64::exp);
    let m = p.mean();
    let split = sorted.partition_point(|&x| x <= m);
    // Lower part: P(X < x_i), built upward from the smallest point.
    if split > 0 {
        let mut acc = tail_mass(sorted[0], p, false)?;
        out[0] = acc;
        for i in 1..split {
            if sorted[i] > sorted[i - 1] {
                acc += settle(integrate_with_breaks(dens, &sorted[i - 1..=i], &spec))?;
            }
            out[i] = acc.min(1.0);
        }
    }
    // Upper part: P(X > x_i), built downward from the largest point.
    if split < n {
        let mut acc = tail_mass(sorted[n - 1], p, true)?;
        out[n - 1] = 1.0 - acc;
        for i in (split..n - 1).rev() {
            if sorted[i + 1] > sorted[i] {
                acc += settle(integrate_with_breaks(dens, &sorted[i..=i + 1], &spec))?;
            }
            out[i] = (1.0 - acc).max(0.0);
        }
    }
    Ok(out)
}
