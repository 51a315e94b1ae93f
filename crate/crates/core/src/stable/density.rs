//! Single-point density and distribution function by direct quadrature of
//! the inversion integrals, switching to the tail expansion far from the
//! centre of the law.

use std::f64::consts::PI;

use super::cf::s0_phase;
use super::params::{s0_shift, StableParams};
use super::series::TailSeries;
use super::StableError;
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// Distance (in units of gamma, from the S0 centre) beyond which the tail
/// expansion replaces quadrature.
pub const FAR_TAIL: f64 = 50.0;

/// `|phi(t)| = exp(-t^alpha)` is below `e^-37` past this point.
fn cf_cutoff(alpha: f64) -> f64 {
    37f64.powf(1.0 / alpha)
}

/// Seed partition fine enough to resolve every oscillation of
/// `cos(beta tan(pi alpha/2) t^alpha - t z)` on `[0, t_max]`.
fn breaks_for(alpha: f64, beta: f64, z: f64) -> Vec<f64> {
    let t_max = cf_cutoff(alpha);
    let skew_phase = s0_phase(t_max, alpha, beta).abs();
    let shift = (z - s0_shift(alpha, beta)).abs();
    let half_periods = ((shift * t_max + skew_phase) / PI).ceil() as usize;
    let pieces = (2 * half_periods).clamp(16, 40_000);
    // Quadratic spacing concentrates nodes where the integrand is largest.
    (0..=pieces)
        .map(|i| {
            let s = i as f64 / pieces as f64;
            t_max * (0.25 * s + 0.75 * s * s)
        })
        .collect()
}

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_subdivisions: 200_000,
    }
}

/// Phase of `phi(t) e^{-itz}` for the standard law, `t > 0`.
fn phase(t: f64, alpha: f64, beta: f64, z: f64) -> f64 {
    s0_phase(t, alpha, beta) - t * (z - s0_shift(alpha, beta))
}

fn modulus(t: f64, alpha: f64) -> f64 {
    (-t.powf(alpha)).exp()
}

pub(crate) fn standard_pdf_quadrature(
    z: f64,
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<f64, StableError> {
    let breaks = breaks_for(alpha, beta, z);
    let integral = integrate_with_breaks(
        |t| modulus(t, alpha) * phase(t, alpha, beta, z).cos(),
        &breaks,
        spec,
    )?;
    Ok((integral.value / PI).max(0.0))
}

pub(crate) fn standard_cdf_quadrature(
    z: f64,
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<f64, StableError> {
    let breaks = breaks_for(alpha, beta, z);
    let integral = integrate_with_breaks(
        |t| modulus(t, alpha) * phase(t, alpha, beta, z).sin() / t,
        &breaks,
        spec,
    )?;
    Ok((0.5 - integral.value / PI).clamp(0.0, 1.0))
}

fn is_far(z: f64, alpha: f64, beta: f64) -> bool {
    (z - s0_shift(alpha, beta)).abs() > FAR_TAIL
}

/// Density of the standard law at `z`.
pub(crate) fn standard_pdf(z: f64, alpha: f64, beta: f64) -> Result<f64, StableError> {
    if is_far(z, alpha, beta) {
        return Ok(TailSeries::new(alpha, beta).density(z).max(0.0));
    }
    standard_pdf_quadrature(z, alpha, beta, &quad_spec())
}

pub(crate) fn standard_cdf(z: f64, alpha: f64, beta: f64) -> Result<f64, StableError> {
    if is_far(z, alpha, beta) {
        let (_, mass) = TailSeries::new(alpha, beta).eval(z);
        let mass = mass.clamp(0.0, 1.0);
        return Ok(if z > s0_shift(alpha, beta) { 1.0 - mass } else { mass });
    }
    standard_cdf_quadrature(z, alpha, beta, &quad_spec())
}

/// Density of `S1(alpha, beta, gamma, mu)` at `x`.
pub fn stable_pdf(x: f64, p: &StableParams) -> Result<f64, StableError> {
    p.validate()?;
    if !x.is_finite() {
        return Ok(0.0);
    }
    Ok(standard_pdf(p.standardize(x), p.alpha, p.beta)? / p.gamma)
}

/// Distribution function of `S1(alpha, beta, gamma, mu)` at `x`.
pub fn stable_cdf(x: f64, p: &StableParams) -> Result<f64, StableError> {
    p.validate()?;
    if x.is_nan() {
        return Err(StableError::InvalidParams("stable_cdf evaluated at NaN".into()));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    standard_cdf(p.standardize(x), p.alpha, p.beta)
}
