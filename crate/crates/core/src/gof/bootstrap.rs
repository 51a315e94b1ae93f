use rayon::prelude::*;

use super::ks::{check_sorted, ks_from_cdf_values};
use super::models::{ModelAdapter, ModelParams};
use super::{BootstrapConfig, GofError, MIN_GOF_OBSERVATIONS};
use crate::numerics::RngStream;

/// Largest tolerated share of replications whose refit fails.
pub const MAX_FAILURE_SHARE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct KsBootstrap {
    pub params: ModelParams,
    /// Model cdf at the sorted observations.
    pub cdf_values: Vec<f64>,
    pub ks_stat: f64,
    pub ks_limit: f64,
    pub p_value: f64,
    pub rejected: bool,
    /// Replicate statistics in replication order, failures omitted.
    pub replicates: Vec<f64>,
    pub failures: usize,
}

fn ks_for(model: &dyn ModelAdapter, mut sample: Vec<f64>, params: &ModelParams) -> Result<f64, GofError> {
    sample.sort_by(f64::total_cmp);
    let u = model.cdf_sorted(&sample, params)?;
    Ok(ks_from_cdf_values(&u))
}

/// Limiting value and p-value of an observed KS distance against replicates:
/// the order statistic at `ceil((1 - s) R)` and `#{D_i >= D} / R`.
pub fn limit_and_p_value(replicates: &[f64], observed: f64, significance: f64) -> (f64, f64) {
    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len();
    let k = (((1.0 - significance) * r as f64).ceil() as usize).clamp(1, r);
    let at_least = replicates.iter().filter(|&&d| d >= observed).count();
    (sorted[k - 1], at_least as f64 / r as f64)
}

/// Parametric bootstrap of the KS distance: fit, measure, then for each
/// replication simulate from the fit, refit and measure again.
pub fn ks_bootstrap(data: &[f64], model: &dyn ModelAdapter, cfg: &BootstrapConfig) -> Result<KsBootstrap, GofError> {
    cfg.validate()?;
    if data.len() < MIN_GOF_OBSERVATIONS {
        return Err(GofError::Precondition(format!(
            "goodness-of-fit needs at least {MIN_GOF_OBSERVATIONS} observations, got {}",
            data.len()
        )));
    }
    let params = model.fit(data, cfg.inner_fit)?;
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    check_sorted(&sorted)?;
    let cdf_values = model.cdf_sorted(&sorted, &params)?;
    let ks_stat = ks_from_cdf_values(&cdf_values);

    let root = RngStream::new(cfg.master_seed, 0);
    let n = data.len();
    let outcomes: Vec<Result<f64, GofError>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|i| {
            let sim = model.sample(n, &params, &root.derive(i))?;
            let refit = model.fit(&sim, cfg.inner_fit)?;
            ks_for(model, sim, &refit)
        })
        .collect();
    let replicates: Vec<f64> = outcomes.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let failures = cfg.replications - replicates.len();
    if failures as f64 > MAX_FAILURE_SHARE * cfg.replications as f64 {
        let first = outcomes.into_iter().find_map(Result::err).map(|e| e.to_string()).unwrap_or_default();
        return Err(GofError::TooManyFailures {
            failed: failures,
            total: cfg.replications,
            first,
        });
    }
    let (ks_limit, p_value) = limit_and_p_value(&replicates, ks_stat, cfg.significance);
    Ok(KsBootstrap {
        params,
        cdf_values,
        ks_stat,
        ks_limit,
        p_value,
        rejected: ks_stat > ks_limit,
        replicates,
        failures,
    })
}
