//! The three fitted families behind a common interface.

use serde::Serialize;

use super::{GofError, InnerFit};
use crate::nig::{nig_cdf_sorted, nig_fit_mle, nig_sample, NigParams};
use crate::numerics::{normal_cdf, RngStream};
use crate::returns::{gaussian_fit, ReturnsError};
use crate::stable::{quantile_fit, stable_fit_mle, stable_sample, StableGrid, StableParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelParams {
    Gaussian { mu: f64, sigma: f64 },
    Stable(StableParams),
    Nig(NigParams),
}

/// A parametric family: estimator, distribution function and sampler.
pub trait ModelAdapter: Sync {
    fn name(&self) -> &'static str;
    /// Number of estimated parameters, for chi-square degrees of freedom.
    fn n_params(&self) -> usize;
    fn fit(&self, data: &[f64], inner: InnerFit) -> Result<ModelParams, GofError>;
    fn cdf_sorted(&self, sorted: &[f64], params: &ModelParams) -> Result<Vec<f64>, GofError>;
    fn sample(&self, n: usize, params: &ModelParams, stream: &RngStream) -> Result<Vec<f64>, GofError>;
}

fn mismatch(model: &str, params: &ModelParams) -> GofError {
    GofError::Precondition(format!("{model} model given {params:?}"))
}

pub struct GaussianModel;
pub struct StableModel;
pub struct NigModel;

impl ModelAdapter for GaussianModel {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn n_params(&self) -> usize {
        2
    }

    fn fit(&self, data: &[f64], _: InnerFit) -> Result<ModelParams, GofError> {
        let g = gaussian_fit(data)?;
        if !(g.sigma > 0.0) {
            return Err(ReturnsError::ZeroVariance.into());
        }
        Ok(ModelParams::Gaussian {
            mu: g.mu,
            sigma: g.sigma,
        })
    }

    fn cdf_sorted(&self, sorted: &[f64], params: &ModelParams) -> Result<Vec<f64>, GofError> {
        match *params {
            ModelParams::Gaussian { mu, sigma } => Ok(sorted.iter().map(|&x| normal_cdf((x - mu) / sigma)).collect()),
            _ => Err(mismatch(self.name(), params)),
        }
    }

    fn sample(&self, n: usize, params: &ModelParams, stream: &RngStream) -> Result<Vec<f64>, GofError> {
        match *params {
            ModelParams::Gaussian { mu, sigma } => Ok(crate::numerics::draw_normal(stream, n)
                .into_iter()
                .map(|z| mu + sigma * z)
                .collect()),
            _ => Err(mismatch(self.name(), params)),
        }
    }
}

impl ModelAdapter for StableModel {
    fn name(&self) -> &'static str {
        "stable"
    }

    fn n_params(&self) -> usize {
        4
    }

    fn fit(&self, data: &[f64], inner: InnerFit) -> Result<ModelParams, GofError> {
        let p = match inner {
            InnerFit::FullMle => stable_fit_mle(data)?.params,
            InnerFit::FastQuantile => quantile_fit(data)?,
        };
        Ok(ModelParams::Stable(p))
    }

    fn cdf_sorted(&self, sorted: &[f64], params: &ModelParams) -> Result<Vec<f64>, GofError> {
        match params {
            ModelParams::Stable(p) => Ok(StableGrid::new(p)?.cdf_sorted(sorted)),
            _ => Err(mismatch(self.name(), params)),
        }
    }

    fn sample(&self, n: usize, params: &ModelParams, stream: &RngStream) -> Result<Vec<f64>, GofError> {
        match params {
            ModelParams::Stable(p) => Ok(stable_sample(n, p, stream)),
            _ => Err(mismatch(self.name(), params)),
        }
    }
}

impl ModelAdapter for NigModel {
    fn name(&self) -> &'static str {
        "nig"
    }

    fn n_params(&self) -> usize {
        4
    }

    /// There is no cheap NIG estimator worth the name, so both settings use
    /// maximum likelihood.
    fn fit(&self, data: &[f64], _: InnerFit) -> Result<ModelParams, GofError> {
        Ok(ModelParams::Nig(nig_fit_mle(data)?.params))
    }

    fn cdf_sorted(&self, sorted: &[f64], params: &ModelParams) -> Result<Vec<f64>, GofError> {
        match params {
            ModelParams::Nig(p) => Ok(nig_cdf_sorted(sorted, p)?),
            _ => Err(mismatch(self.name(), params)),
        }
    }

    fn sample(&self, n: usize, params: &ModelParams, stream: &RngStream) -> Result<Vec<f64>, GofError> {
        match params {
            ModelParams::Nig(p) => Ok(nig_sample(n, p, stream)),
            _ => Err(mismatch(self.name(), params)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdfs_are_monotone_and_families_match() {
        let models: [&dyn ModelAdapter; 3] = [&GaussianModel, &StableModel, &NigModel];
        for m in models {
            let x = match m.name() {
                "gaussian" => GaussianModel.sample(500, &ModelParams::Gaussian { mu: 0.1, sigma: 2.0 }, &RngStream::new(1, 0)),
                "stable" => StableModel.sample(
                    500,
                    &ModelParams::Stable(StableParams::new(1.6, 0.2, 1.0, 0.0).unwrap()),
                    &RngStream::new(1, 0),
                ),
                _ => NigModel.sample(
                    500,
                    &ModelParams::Nig(NigParams::new(2.0, 0.5, 1.0, 0.0).unwrap()),
                    &RngStream::new(1, 0),
                ),
            }
            .unwrap();
            let p = m.fit(&x, InnerFit::FastQuantile).unwrap();
            let mut s = x.clone();
            s.sort_by(f64::total_cmp);
            let f = m.cdf_sorted(&s, &p).unwrap();
            assert!(f.windows(2).all(|w| w[0] <= w[1]), "{}", m.name());
            assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
            let other = ModelParams::Gaussian { mu: 0.0, sigma: 1.0 };
            if m.name() != "gaussian" {
                assert!(m.cdf_sorted(&s, &other).is_err());
            }
        }
    }
}
