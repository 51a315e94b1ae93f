//! Goodness of fit: KS distance with bootstrap critical values, Pearson
//! chi-square on equiprobable bins, and Anderson–Darling for the normal.

mod ad;
mod bootstrap;
mod chisq;
mod ks;
mod models;

use serde::Serialize;
use thiserror::Error;

pub use ad::anderson_darling_normal;
pub use bootstrap::{ks_bootstrap, limit_and_p_value, KsBootstrap, MAX_FAILURE_SHARE};
pub use chisq::{default_bins, pearson_chi_square, ChiSquare, MIN_CHI2_OBSERVATIONS};
pub use ks::{ks_from_cdf_values, ks_statistic};
pub use models::{GaussianModel, ModelAdapter, ModelParams, NigModel, StableModel};

use crate::nig::NigError;
use crate::numerics::NumericsError;
use crate::returns::ReturnsError;
use crate::stable::StableError;

pub const MIN_GOF_OBSERVATIONS: usize = 100;
pub const MIN_REPLICATIONS: usize = 100;

#[derive(Debug, Error)]
pub enum GofError {
    #[error("data not sorted ascending at index {index}")]
    Unsorted { index: usize },
    #[error("{0}")]
    Precondition(String),
    #[error("only {bins} equiprobable bins with at least 5 expected counts, need {needed}")]
    TooFewBins { bins: usize, needed: usize },
    #[error("{failed} of {total} bootstrap replications failed to fit (first: {first})")]
    TooManyFailures { failed: usize, total: usize, first: String },
    #[error("invalid bootstrap configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Stable(#[from] StableError),
    #[error(transparent)]
    Nig(#[from] NigError),
    #[error(transparent)]
    Returns(#[from] ReturnsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Estimator used for the observed sample and for every replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerFit {
    #[default]
    FullMle,
    /// Quantile estimate for the stable law; other families are unaffected.
    FastQuantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub replications: usize,
    pub significance: f64,
    pub inner_fit: InnerFit,
    pub master_seed: u64,
    /// Overrides the default chi-square bin count.
    pub chi2_bins: Option<usize>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replications: 1000,
            significance: 0.05,
            inner_fit: InnerFit::FullMle,
            master_seed: 2502,
            chi2_bins: None,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), GofError> {
        if self.replications < MIN_REPLICATIONS {
            return Err(GofError::Config(format!(
                "replications must be at least {MIN_REPLICATIONS}, got {}",
                self.replications
            )));
        }
        if !(self.significance > 0.0 && self.significance < 0.5) {
            return Err(GofError::Config(format!(
                "significance must lie in (0, 0.5), got {}",
                self.significance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub model: String,
    pub params: ModelParams,
    pub n: usize,
    pub ks_stat: f64,
    pub ks_limit: f64,
    pub p_value: f64,
    pub chi2_stat: f64,
    pub chi2_dof: u32,
    pub chi2_pvalue: f64,
    pub chi2_bins: usize,
    pub ad_stat: Option<f64>,
    pub ad_pvalue: Option<f64>,
    pub rejected: bool,
    pub significance: f64,
    pub replications: usize,
    pub failed_replications: usize,
}

/// One row of a full run: a report, or the error that stopped that model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelGof {
    Report(GofReport),
    Failed { model: String, error: String },
}

impl ModelGof {
    pub fn model(&self) -> &str {
        match self {
            ModelGof::Report(r) => &r.model,
            ModelGof::Failed { model, .. } => model,
        }
    }

    pub fn report(&self) -> Option<&GofReport> {
        match self {
            ModelGof::Report(r) => Some(r),
            ModelGof::Failed { .. } => None,
        }
    }
}

/// KS bootstrap plus chi-square, and Anderson–Darling when the model is Gaussian.
pub fn bootstrap_gof(data: &[f64], model: &dyn ModelAdapter, cfg: &BootstrapConfig) -> Result<GofReport, GofError> {
    let ks = ks_bootstrap(data, model, cfg)?;
    let chi = pearson_chi_square(&ks.cdf_values, model.n_params(), cfg.chi2_bins)?;
    let (ad_stat, ad_pvalue) = match ks.params {
        ModelParams::Gaussian { mu, sigma } => {
            let (a, p) = anderson_darling_normal(data, mu, sigma)?;
            (Some(a), Some(p))
        }
        _ => (None, None),
    };
    Ok(GofReport {
        model: model.name().to_string(),
        params: ks.params,
        n: data.len(),
        ks_stat: ks.ks_stat,
        ks_limit: ks.ks_limit,
        p_value: ks.p_value,
        chi2_stat: chi.stat,
        chi2_dof: chi.dof,
        chi2_pvalue: chi.p_value,
        chi2_bins: chi.bins,
        ad_stat,
        ad_pvalue,
        rejected: ks.rejected,
        significance: cfg.significance,
        replications: cfg.replications,
        failed_replications: ks.failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gaussian,
    Stable,
    Nig,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Gaussian, ModelKind::Stable, ModelKind::Nig];

    pub fn adapter(self) -> &'static dyn ModelAdapter {
        match self {
            ModelKind::Gaussian => &GaussianModel,
            ModelKind::Stable => &StableModel,
            ModelKind::Nig => &NigModel,
        }
    }

    pub fn name(self) -> &'static str {
        self.adapter().name()
    }
}

/// One row per requested model; a failing model does not stop the others.
pub fn run_gof(data: &[f64], cfg: &BootstrapConfig, models: &[ModelKind]) -> Vec<ModelGof> {
    models
        .iter()
        .map(|m| match bootstrap_gof(data, m.adapter(), cfg) {
            Ok(r) => ModelGof::Report(r),
            Err(e) => ModelGof::Failed {
                model: m.name().to_string(),
                error: e.to_string(),
            },
        })
        .collect()
}

/// Gaussian, stable and NIG rows.
pub fn run_full_gof(data: &[f64], cfg: &BootstrapConfig) -> Vec<ModelGof> {
    run_gof(data, cfg, &ModelKind::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{draw_normal, RngStream};
    use proptest::prelude::*;

    fn cfg(reps: usize, seed: u64) -> BootstrapConfig {
        BootstrapConfig {
            replications: reps,
            master_seed: seed,
            ..Default::default()
        }
    }

    #[test]
    fn config_bounds() {
        assert!(cfg(99, 0).validate().is_err());
        assert!(BootstrapConfig { significance: 0.5, ..cfg(100, 0) }.validate().is_err());
        assert!(BootstrapConfig { significance: 0.0, ..cfg(100, 0) }.validate().is_err());
        assert!(cfg(100, 0).validate().is_ok());
    }

    #[test]
    fn gaussian_limit_matches_lilliefors_constant() {
        let x = draw_normal(&RngStream::new(5, 5), 2000);
        let ks = ks_bootstrap(&x, &GaussianModel, &cfg(1000, 9)).unwrap();
        let want = 0.886 / (2000f64).sqrt();
        assert!((ks.ks_limit - want).abs() < 0.1 * want, "{} vs {want}", ks.ks_limit);
        assert_eq!(ks.failures, 0);
    }

    #[test]
    fn gaussian_null_calibration() {
        let seeds = 200;
        let s = 0.05;
        let mut rejects = 0;
        for k in 0..seeds {
            let x: Vec<f64> = draw_normal(&RngStream::new(1000 + k, 0), 500).iter().map(|z| 3.0 + 0.5 * z).collect();
            if ks_bootstrap(&x, &GaussianModel, &cfg(200, k)).unwrap().rejected {
                rejects += 1;
            }
        }
        let rate = rejects as f64 / seeds as f64;
        let band = 2.0 * (s * (1.0 - s) / seeds as f64).sqrt();
        // Discreteness of the 200-replicate quantile adds a little on top of the binomial band.
        assert!((rate - s).abs() <= band + 0.01, "rate {rate}");
    }

    #[test]
    fn independent_of_worker_count() {
        let x = draw_normal(&RngStream::new(2, 2), 300);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bootstrap_gof(&x, &NigModel, &cfg(100, 17)).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn short_data_fails_every_row() {
        let x = draw_normal(&RngStream::new(2, 2), 99);
        let rows = run_full_gof(&x, &cfg(100, 1));
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(matches!(r, ModelGof::Failed { error, .. } if error.contains("at least 100")), "{r:?}");
        }
    }

    #[test]
    fn report_json_fields() {
        let x = draw_normal(&RngStream::new(8, 0), 400);
        let r = bootstrap_gof(&x, &GaussianModel, &cfg(100, 3)).unwrap();
        let v: serde_json::Value = serde_json::to_value(ModelGof::Report(r.clone())).unwrap();
        for key in ["model", "ks_stat", "ks_limit", "p_value", "chi2_stat", "chi2_dof", "chi2_pvalue", "ad_stat", "rejected"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["model"], "gaussian");
        assert_eq!(r.rejected, r.ks_stat > r.ks_limit);
        assert!(r.ad_stat.is_some());
    }

    proptest! {
        #[test]
        fn limit_and_p_value_agree(reps in prop::collection::vec(0.0f64..0.1, 100..300), d in 0.0f64..0.1, s in 0.01f64..0.49) {
            let (limit, p) = limit_and_p_value(&reps, d, s);
            prop_assert!((0.0..=1.0).contains(&p));
            let tie = reps.iter().any(|&r| r == d);
            if !tie {
                // ceil((1 - s) R) is the first order statistic past the upper s tail.
                let r = reps.len() as f64;
                let upper = r - ((1.0 - s) * r).ceil();
                if d > limit {
                    prop_assert!(p * r <= upper + 1e-9);
                } else {
                    prop_assert!(p * r >= upper + 1.0 - 1e-9);
                }
            }
        }
    }
}
