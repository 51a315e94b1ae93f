//! Quantile-matching and maximum-likelihood estimation.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::density::stable_pdf;
use super::grid::StableGrid;
use super::params::{s0_shift, StableParams};
use super::StableError;
use crate::numerics::{nelder_mead_minimize, NelderMeadOptions};

pub const MIN_FIT_OBSERVATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Mle,
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableFitResult {
    pub params: StableParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub method: FitMethod,
}

/// `sum ln f(x_i)` by single-point evaluation.
pub fn stable_loglik(data: &[f64], p: &StableParams) -> Result<f64, StableError> {
    if data.is_empty() {
        return Err(StableError::EmptyData);
    }
    let mut total = 0.0;
    for &x in data {
        total += stable_pdf(x, p)?.ln();
    }
    Ok(total)
}

/// `sum ln f(x_i)` through the FFT grid; the form used inside optimisers.
pub fn grid_loglik(data: &[f64], grid: &StableGrid) -> f64 {
    data.iter().map(|&x| grid.ln_pdf(x)).sum()
}

const TABLE_ALPHA_MIN: f64 = 0.5;
const TABLE_ALPHA_STEP: f64 = 0.025;
const TABLE_ALPHAS: usize = 61;
const TABLE_BETA_STEP: f64 = 0.1;
const TABLE_BETAS: usize = 11;

#[derive(Debug, Clone, Copy, Default)]
struct Entry {
    nu_alpha: f64,
    nu_beta: f64,
    nu_gamma: f64,
    /// Median of the standard S0 law.
    median0: f64,
}

/// Quantile functionals of standard laws on an `(alpha, beta >= 0)` lattice.
struct QuantileTable {
    rows: Vec<[Entry; TABLE_BETAS]>,
}

fn table_alpha(i: usize) -> f64 {
    TABLE_ALPHA_MIN + TABLE_ALPHA_STEP * i as f64
}

impl QuantileTable {
    fn build() -> Self {
        let mut rows = vec![[Entry::default(); TABLE_BETAS]; TABLE_ALPHAS];
        for (i, row) in rows.iter_mut().enumerate() {
            let alpha = table_alpha(i);
            for (j, e) in row.iter_mut().enumerate() {
                let beta = if alpha == 2.0 { 0.0 } else { TABLE_BETA_STEP * j as f64 };
                let p = StableParams::standard(alpha, beta).expect("lattice point is valid");
                let g = StableGrid::coarse(&p).expect("grid for lattice point");
                let q = |level: f64| g.quantile(level).expect("level inside (0, 1)");
                let (q05, q25, q50, q75, q95) = (q(0.05), q(0.25), q(0.5), q(0.75), q(0.95));
                *e = Entry {
                    nu_alpha: (q95 - q05) / (q75 - q25),
                    nu_beta: (q95 + q05 - 2.0 * q50) / (q95 - q05),
                    nu_gamma: q75 - q25,
                    median0: q50 - s0_shift(alpha, beta),
                };
            }
        }
        Self { rows }
    }

    fn get() -> &'static Self {
        static TABLE: OnceLock<QuantileTable> = OnceLock::new();
        TABLE.get_or_init(Self::build)
    }

    /// Bilinear interpolation of `field` at `(alpha, beta)`, `beta >= 0`.
    fn interp(&self, alpha: f64, beta: f64, field: impl Fn(&Entry) -> f64) -> f64 {
        let s = ((alpha - TABLE_ALPHA_MIN) / TABLE_ALPHA_STEP).clamp(0.0, (TABLE_ALPHAS - 1) as f64);
        let i = (s.floor() as usize).min(TABLE_ALPHAS - 2);
        let u = s - i as f64;
        let r = (beta / TABLE_BETA_STEP).clamp(0.0, (TABLE_BETAS - 1) as f64);
        let j = (r.floor() as usize).min(TABLE_BETAS - 2);
        let v = r - j as f64;
        let at = |a: usize, b: usize| field(&self.rows[a][b]);
        (1.0 - u) * ((1.0 - v) * at(i, j) + v * at(i, j + 1))
            + u * ((1.0 - v) * at(i + 1, j) + v * at(i + 1, j + 1))
    }

    /// Alpha whose tabulated `nu_alpha` at this `beta` equals `target`.
    fn alpha_for(&self, target: f64, beta: f64) -> f64 {
        let nu = |i: usize| self.interp(table_alpha(i), beta, |e| e.nu_alpha);
        if target >= nu(0) {
            return TABLE_ALPHA_MIN;
        }
        if target <= nu(TABLE_ALPHAS - 1) {
            return 2.0;
        }
        // nu_alpha decreases in alpha; locate the bracketing segment.
        let (mut lo, mut hi) = (0, TABLE_ALPHAS - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if nu(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (a, b) = (nu(lo), nu(hi));
        let w = if a == b { 0.0 } else { (a - target) / (a - b) };
        table_alpha(lo) + w * TABLE_ALPHA_STEP
    }

    /// `(alpha, |beta|)` reproducing the sample functionals.
    fn invert(&self, nu_alpha: f64, nu_beta_abs: f64) -> (f64, f64) {
        let nu_beta_at = |beta: f64| {
            let a = self.alpha_for(nu_alpha, beta);
            (a, self.interp(a, beta, |e| e.nu_beta))
        };
        let (a0, nb0) = nu_beta_at(0.0);
        if a0 >= 2.0 || nu_beta_abs <= nb0 {
            return (a0, 0.0);
        }
        let (a1, nb1) = nu_beta_at(1.0);
        if nu_beta_abs >= nb1 {
            return (a1, 1.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if nu_beta_at(mid).1 < nu_beta_abs {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let beta = 0.5 * (lo + hi);
        (self.alpha_for(nu_alpha, beta), beta)
    }
}

/// Linear-interpolation sample quantile of sorted data.
fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 >= sorted.len() {
        sorted[sorted.len() - 1]
    } else {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }
}

fn check_sample(data: &[f64]) -> Result<(), StableError> {
    if data.is_empty() {
        return Err(StableError::EmptyData);
    }
    if data.len() < MIN_FIT_OBSERVATIONS {
        return Err(StableError::TooFewObservations {
            needed: MIN_FIT_OBSERVATIONS,
            got: data.len(),
        });
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(StableError::DegenerateData("non-finite observation".into()));
    }
    Ok(())
}

/// McCulloch-style quantile estimate from already sorted data.
pub fn quantile_fit_sorted(sorted: &[f64]) -> Result<StableParams, StableError> {
    check_sample(sorted)?;
    let q = |p: f64| sorted_quantile(sorted, p);
    let (q05, q25, q50, q75, q95) = (q(0.05), q(0.25), q(0.5), q(0.75), q(0.95));
    let iqr = q75 - q25;
    if !(iqr > 0.0) || !(q95 - q05 > 0.0) {
        return Err(StableError::DegenerateData("interquartile range is zero".into()));
    }
    let nu_alpha = (q95 - q05) / iqr;
    let nu_beta = (q95 + q05 - 2.0 * q50) / (q95 - q05);
    let table = QuantileTable::get();
    let (alpha, beta_abs) = table.invert(nu_alpha, nu_beta.abs());
    let sign = if nu_beta < 0.0 { -1.0 } else { 1.0 };
    let beta = if alpha >= 2.0 { 0.0 } else { sign * beta_abs };
    let nu_gamma = table.interp(alpha, beta_abs, |e| e.nu_gamma);
    let median0 = sign * table.interp(alpha, beta_abs, |e| e.median0);
    let gamma = iqr / nu_gamma;
    StableParams::from_s0(alpha, beta, gamma, q50 - gamma * median0)
}

/// McCulloch-style quantile estimate.
pub fn quantile_fit(data: &[f64]) -> Result<StableParams, StableError> {
    check_sample(data)?;
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_fit_sorted(&sorted)
}

pub fn stable_fit_quantile(data: &[f64]) -> Result<StableFitResult, StableError> {
    let params = quantile_fit(data)?;
    let grid = StableGrid::new(&params)?;
    let log_likelihood = grid_loglik(data, &grid);
    Ok(StableFitResult {
        params,
        log_likelihood,
        converged: true,
        method: FitMethod::Quantile,
    })
}

const ALPHA_LO: f64 = 0.5;
const ALPHA_SPAN: f64 = 1.5;

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates: logit-alpha, atanh-beta, log-gamma, S0 location.
fn to_params(x: &[f64]) -> Result<StableParams, StableError> {
    let alpha = ALPHA_LO + ALPHA_SPAN * sigmoid(x[0]);
    StableParams::from_s0(alpha, x[1].tanh(), x[2].exp(), x[3])
}

fn from_params(p: &StableParams) -> [f64; 4] {
    let alpha = p.alpha.clamp(0.51, 1.98);
    let beta = p.beta.clamp(-0.98, 0.98);
    let p = StableParams::from_s0(alpha, beta, p.gamma, p.s0_location()).unwrap_or(*p);
    [
        logit((alpha - ALPHA_LO) / ALPHA_SPAN),
        beta.atanh(),
        p.gamma.ln(),
        p.s0_location(),
    ]
}

/// Maximum likelihood through the FFT density grid, started from the
/// quantile estimate on data rescaled to unit quantile scale.
pub fn stable_fit_mle(data: &[f64]) -> Result<StableFitResult, StableError> {
    let start = quantile_fit(data)?;
    let scale = start.gamma;
    let loc = start.s0_location();
    let z: Vec<f64> = data.iter().map(|&x| (x - loc) / scale).collect();
    let start_z = start.affine(1.0 / scale, -loc / scale)?;

    let objective = |x: &[f64]| -> f64 {
        match to_params(x).and_then(|p| StableGrid::new(&p)) {
            Ok(grid) => -grid_loglik(&z, &grid),
            Err(_) => f64::INFINITY,
        }
    };
    let opts = NelderMeadOptions {
        tol: 1e-5,
        max_iter: 2000,
        initial_step: 0.2,
        restarts: 2,
    };
    let best = nelder_mead_minimize(objective, &from_params(&start_z), &opts)?;
    let params_z = to_params(&best.x)?;
    let params = params_z.affine(scale, loc)?;
    let log_likelihood = -best.value - data.len() as f64 * scale.ln();
    Ok(StableFitResult {
        params,
        log_likelihood,
        converged: best.converged && log_likelihood.is_finite(),
        method: FitMethod::Mle,
    })
}
