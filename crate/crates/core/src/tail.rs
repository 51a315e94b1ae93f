//! Power-law tail index: continuous Pareto MLE with the threshold chosen by
//! minimum KS distance, a Hill cross-check, and a sample-size study showing
//! the upward bias of tail indices measured on stable samples.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::RngStream;
use crate::stable::{stable_sample, StableParams};

pub const MIN_TAIL_OBSERVATIONS: usize = 100;
pub const MIN_TAIL_POINTS: usize = 10;
/// Tail sizes are scanned in steps of this many points up to `DENSE_SCAN_LIMIT`,
/// then geometrically.
const DENSE_STEP: usize = 5;
const DENSE_SCAN_LIMIT: usize = 1000;
const GEOMETRIC_STEP: f64 = 1.005;
/// Mean estimates at or above this are reported as lacking a stable power tail.
pub const NO_STABLE_TAIL_ALPHA: f64 = 3.0;

#[derive(Debug, Error)]
pub enum TailError {
    #[error("need at least {needed} nonzero magnitudes, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("invalid tail size {k} for {n} magnitudes: need {MIN_TAIL_POINTS} <= k < n/2")]
    InvalidTailSize { k: usize, n: usize },
    #[error("no threshold leaves {MIN_TAIL_POINTS} distinct points in the tail")]
    NoValidThreshold,
    #[error("{0}")]
    InvalidStudy(String),
    #[error("non-finite observation")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    /// Exponent of the survival function; the density decays as `x^(-1-alpha)`.
    pub alpha_tail: f64,
    pub xmin: f64,
    pub n_tail: usize,
    pub ks_at_xmin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailSide {
    /// Magnitudes of both signs together.
    #[default]
    Pooled,
    Positive,
    Negative,
}

/// Nonzero magnitudes on the chosen side, descending.
fn magnitudes(data: &[f64], side: TailSide) -> Result<Vec<f64>, TailError> {
    if data.iter().any(|x| !x.is_finite()) {
        return Err(TailError::NonFinite);
    }
    let mut y: Vec<f64> = data
        .iter()
        .filter_map(|&x| match side {
            TailSide::Pooled => (x != 0.0).then(|| x.abs()),
            TailSide::Positive => (x > 0.0).then_some(x),
            TailSide::Negative => (x < 0.0).then(|| -x),
        })
        .collect();
    y.sort_by(|a, b| b.total_cmp(a));
    Ok(y)
}

/// Hill estimate from the `k` largest magnitudes, relative to the `(k+1)`-th.
pub fn hill_estimator(data: &[f64], k: usize) -> Result<f64, TailError> {
    let y = magnitudes(data, TailSide::Pooled)?;
    let n = y.len();
    if k < MIN_TAIL_POINTS || 2 * k >= n {
        return Err(TailError::InvalidTailSize { k, n });
    }
    let threshold = y[k];
    let s: f64 = y[..k].iter().map(|v| (v / threshold).ln()).sum();
    if !(s > 0.0) {
        return Err(TailError::NoValidThreshold);
    }
    Ok(k as f64 / s)
}

fn candidate_sizes(m: usize) -> Vec<usize> {
    let top = m / 2;
    let mut ks = Vec::new();
    let mut k = MIN_TAIL_POINTS;
    while k <= top.min(DENSE_SCAN_LIMIT) {
        ks.push(k);
        k += DENSE_STEP;
    }
    let mut g = *ks.last().unwrap_or(&MIN_TAIL_POINTS) as f64;
    loop {
        g *= GEOMETRIC_STEP;
        let k = g.ceil() as usize;
        if k > top {
            break;
        }
        if ks.last() != Some(&k) {
            ks.push(k);
        }
    }
    ks
}

/// Pareto MLE with `xmin` at the value minimizing the KS distance between the
/// tail sample and the fitted law, over magnitudes of both signs.
pub fn powerlaw_fit_ks(data: &[f64]) -> Result<TailFit, TailError> {
    powerlaw_fit_ks_side(data, TailSide::Pooled)
}

pub fn powerlaw_fit_ks_side(data: &[f64], side: TailSide) -> Result<TailFit, TailError> {
    let y = magnitudes(data, side)?;
    if y.len() < MIN_TAIL_OBSERVATIONS {
        return Err(TailError::TooFewObservations {
            needed: MIN_TAIL_OBSERVATIONS,
            got: y.len(),
        });
    }
    let mut best: Option<TailFit> = None;
    let mut excess = Vec::with_capacity(y.len() / 2);
    for k in candidate_sizes(y.len()) {
        // Log-ratios to the threshold keep the estimate exactly scale free.
        let xmin = y[k - 1];
        excess.clear();
        excess.extend(y[..k].iter().map(|v| (v / xmin).ln()));
        let s: f64 = excess.iter().sum();
        if !(s > 0.0) {
            continue;
        }
        let alpha = k as f64 / s;
        let kf = k as f64;
        // Tail points ascending: excess[k-1], ..., excess[0].
        let mut d: f64 = 0.0;
        for j in 0..k {
            let f = -(-alpha * excess[k - 1 - j]).exp_m1();
            d = d.max(f - j as f64 / kf).max((j + 1) as f64 / kf - f);
        }
        if best.is_none_or(|b| d < b.ks_at_xmin) {
            best = Some(TailFit {
                alpha_tail: alpha,
                xmin,
                n_tail: k,
                ks_at_xmin: d,
            });
        }
    }
    best.ok_or(TailError::NoValidThreshold)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailStudyRow {
    pub sample_size: usize,
    pub alpha_hat_mean: Option<f64>,
    pub alpha_hat_sd: Option<f64>,
    /// Seeds whose fit succeeded.
    pub seeds: usize,
    pub failures: Vec<String>,
}

impl TailStudyRow {
    pub fn lacks_stable_tail(&self) -> bool {
        self.alpha_hat_mean.is_some_and(|a| a >= NO_STABLE_TAIL_ALPHA)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailStudyResult {
    pub rows: Vec<TailStudyRow>,
    pub true_params: StableParams,
    pub seeds: usize,
}

impl TailStudyResult {
    /// `sample_size,alpha_hat_mean,alpha_hat_sd,seeds`, empty cells where every seed failed.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sample_size", "alpha_hat_mean", "alpha_hat_sd", "seeds"])?;
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.sample_size.to_string(),
                cell(r.alpha_hat_mean),
                cell(r.alpha_hat_sd),
                r.seeds.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Simulates `seeds_per_size` samples at every size and records the mean and
/// standard deviation of the tail index. Cell `(size i, seed j)` draws from
/// stream `derive(j)` of `(master_seed, i)`.
pub fn sample_size_study(
    true_params: &StableParams,
    sizes: &[usize],
    seeds_per_size: usize,
    master_seed: u64,
) -> Result<TailStudyResult, TailError> {
    true_params
        .validate()
        .map_err(|e| TailError::InvalidStudy(e.to_string()))?;
    if sizes.is_empty() || seeds_per_size == 0 {
        return Err(TailError::InvalidStudy("need at least one size and one seed".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TailError::InvalidStudy("sizes must be strictly increasing".into()));
    }
    let cells: Vec<(usize, usize)> = (0..sizes.len())
        .flat_map(|i| (0..seeds_per_size).map(move |j| (i, j)))
        .collect();
    let fits: Vec<Result<f64, TailError>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let stream = RngStream::new(master_seed, i as u64).derive(j as u64);
            let x = stable_sample(sizes[i], true_params, &stream);
            powerlaw_fit_ks(&x).map(|f| f.alpha_tail)
        })
        .collect();
    let rows = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let cell = &fits[i * seeds_per_size..(i + 1) * seeds_per_size];
            let ok: Vec<f64> = cell.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
            let failures = cell.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
            let (mean, sd) = match ok.len() {
                0 => (None, None),
                1 => (Some(ok[0]), None),
                m => {
                    let mean = ok.iter().sum::<f64>() / m as f64;
                    let var = ok.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
                    (Some(mean), Some(var.sqrt()))
                }
            };
            TailStudyRow {
                sample_size: n,
                alpha_hat_mean: mean,
                alpha_hat_sd: sd,
                seeds: ok.len(),
                failures,
            }
        })
        .collect();
    Ok(TailStudyResult {
        rows,
        true_params: *true_params,
        seeds: seeds_per_size,
    })
}
