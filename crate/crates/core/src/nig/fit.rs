//! Maximum-likelihood fitting from a moment-matched start.

use serde::{Deserialize, Serialize};

use super::{ln_pdf_unchecked, NigError, NigParams};
use crate::numerics::{nelder_mead_minimize, NelderMeadOptions};

pub const MIN_FIT_OBSERVATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigFitResult {
    pub params: NigParams,
    pub log_likelihood: f64,
    pub converged: bool,
}

struct Moments {
    mean: f64,
    sd: f64,
    skew: f64,
    excess: f64,
}

fn moments(data: &[f64]) -> Result<Moments, NigError> {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in data {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if !(m2 > 0.0) {
        return Err(NigError::DegenerateData("zero variance".into()));
    }
    Ok(Moments {
        mean,
        sd: m2.sqrt(),
        skew: m3 / m2.powf(1.5),
        excess: m4 / (m2 * m2) - 3.0,
    })
}

fn check_sample(data: &[f64]) -> Result<(), NigError> {
    if data.is_empty() {
        return Err(NigError::EmptyData);
    }
    if data.len() < MIN_FIT_OBSERVATIONS {
        return Err(NigError::TooFewObservations {
            needed: MIN_FIT_OBSERVATIONS,
            got: data.len(),
        });
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(NigError::DegenerateData("non-finite observation".into()));
    }
    Ok(())
}

const MIN_EXCESS: f64 = 0.01;
const MAX_RHO2: f64 = 0.8;

fn start_from_moments(m: &Moments) -> Result<NigParams, NigError> {
    // Skewness^2 / excess = 3 rho^2 / (1 + 4 rho^2), rho = beta / alpha.
    let ek = m.excess.max(MIN_EXCESS);
    let s2 = m.skew * m.skew;
    let denom = 3.0 * ek - 4.0 * s2;
    let rho2 = if denom > 0.0 { (s2 / denom).min(MAX_RHO2) } else { MAX_RHO2 };
    let dg = 3.0 * (1.0 + 4.0 * rho2) / ek;
    let var = m.sd * m.sd;
    let g = (dg / (var * (1.0 - rho2))).sqrt();
    let alpha = g / (1.0 - rho2).sqrt();
    let beta = m.skew.signum() * rho2.sqrt() * alpha;
    let delta = dg / g;
    let mu = m.mean - delta * beta / g;
    NigParams::new(alpha, beta, delta, mu)
}

/// Moment-matched parameters, clamped into the valid region.
pub fn moment_start(data: &[f64]) -> Result<NigParams, NigError> {
    check_sample(data)?;
    start_from_moments(&moments(data)?)
}

/// Unconstrained coordinates on standardized data:
/// `alpha = e^a`, `beta = alpha tanh(b)`, `delta = e^d`, `mu`.
fn to_params(x: &[f64]) -> Option<NigParams> {
    let alpha = x[0].clamp(-10.0, 12.0).exp();
    let delta = x[2].clamp(-30.0, 30.0).exp();
    NigParams::new(alpha, alpha * x[1].tanh(), delta, x[3]).ok()
}

fn from_params(p: &NigParams) -> [f64; 4] {
    [p.alpha.ln(), (p.beta / p.alpha).clamp(-0.999, 0.999).atanh(), p.delta.ln(), p.mu]
}

fn loglik(z: &[f64], p: &NigParams) -> f64 {
    let mut total = 0.0;
    for &x in z {
        match ln_pdf_unchecked(x, p) {
            Ok(l) => total += l,
            Err(_) => return f64::NEG_INFINITY,
        }
    }
    total
}

/// Maximum likelihood by Nelder–Mead on mean/sd-standardized data.
pub fn nig_fit_mle(data: &[f64]) -> Result<NigFitResult, NigError> {
    check_sample(data)?;
    let m = moments(data)?;
    let z: Vec<f64> = data.iter().map(|&x| (x - m.mean) / m.sd).collect();
    let start = start_from_moments(&moments(&z)?)?;
    let objective = |x: &[f64]| match to_params(x) {
        Some(p) => -loglik(&z, &p),
        None => f64::INFINITY,
    };
    let opts = NelderMeadOptions {
        tol: 1e-7,
        max_iter: 4000,
        initial_step: 0.3,
        restarts: 3,
    };
    let best = nelder_mead_minimize(objective, &from_params(&start), &opts)?;
    let pz = to_params(&best.x)
        .ok_or_else(|| NigError::InvalidParams("optimizer left the parameter region".into()))?;
    let params = pz.affine(m.sd, m.mean)?;
    let log_likelihood = -best.value - data.len() as f64 * m.sd.ln();
    Ok(NigFitResult {
        params,
        log_likelihood,
        converged: best.converged && log_likelihood.is_finite(),
    })
}
