//! Summary, fit and histogram-overlay records written by the command line.

use std::io::Write;

use serde::Serialize;

use crate::gof::{GofError, ModelKind, ModelParams};
use crate::nig::{nig_fit_mle, nig_pdf};
use crate::returns::{gaussian_fit, summary_stats, ReturnsError};
use crate::stable::{stable_fit_mle, StableGrid};

pub const MIN_HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summary_row(returns: &[f64]) -> Result<SummaryRow, ReturnsError> {
    let s = summary_stats(returns)?;
    Ok(SummaryRow {
        n: returns.len(),
        mean: s.mean,
        std_dev: s.std_dev,
        skewness: s.skewness,
        kurtosis: s.kurtosis,
        min: returns.iter().copied().fold(f64::INFINITY, f64::min),
        max: returns.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelFit {
    Fitted {
        model: String,
        params: ModelParams,
        log_likelihood: f64,
        converged: bool,
    },
    Failed {
        model: String,
        error: String,
    },
}

impl ModelFit {
    pub fn params(&self) -> Option<(&str, &ModelParams)> {
        match self {
            ModelFit::Fitted { model, params, .. } => Some((model, params)),
            ModelFit::Failed { .. } => None,
        }
    }
}

/// Maximum-likelihood fit of one family.
pub fn fit_model(returns: &[f64], kind: ModelKind) -> Result<(ModelParams, f64, bool), GofError> {
    Ok(match kind {
        ModelKind::Gaussian => {
            let g = gaussian_fit(returns)?;
            (ModelParams::Gaussian { mu: g.mu, sigma: g.sigma }, g.log_likelihood, true)
        }
        ModelKind::Stable => {
            let f = stable_fit_mle(returns)?;
            (ModelParams::Stable(f.params), f.log_likelihood, f.converged)
        }
        ModelKind::Nig => {
            let f = nig_fit_mle(returns)?;
            (ModelParams::Nig(f.params), f.log_likelihood, f.converged)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub source: String,
    pub skipped_missing: usize,
    pub summary: SummaryRow,
    pub models: Vec<ModelFit>,
}

pub fn fit_report(returns: &[f64], source: &str, skipped_missing: usize, models: &[ModelKind]) -> Result<FitReport, ReturnsError> {
    let summary = summary_row(returns)?;
    let models = models
        .iter()
        .map(|&k| match fit_model(returns, k) {
            Ok((params, log_likelihood, converged)) => ModelFit::Fitted {
                model: k.name().to_string(),
                params,
                log_likelihood,
                converged,
            },
            Err(e) => ModelFit::Failed {
                model: k.name().to_string(),
                error: e.to_string(),
            },
        })
        .collect();
    Ok(FitReport {
        source: source.to_string(),
        skipped_missing,
        summary,
        models,
    })
}

/// Fitted density at each point.
pub fn model_density(params: &ModelParams, x: &[f64]) -> Result<Vec<f64>, GofError> {
    Ok(match params {
        ModelParams::Gaussian { mu, sigma } => {
            let c = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            x.iter().map(|v| c * (-0.5 * ((v - mu) / sigma).powi(2)).exp()).collect()
        }
        ModelParams::Stable(p) => {
            let grid = StableGrid::new(p)?;
            x.iter().map(|&v| grid.pdf(v)).collect()
        }
        ModelParams::Nig(p) => x.iter().map(|&v| nig_pdf(v, p)).collect::<Result<_, _>>()?,
    })
}

/// Equal-width histogram over the data range with fitted densities at bin centres.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overlay {
    pub bin_width: f64,
    pub centers: Vec<f64>,
    /// Normalized so that the densities times the bin width sum to one.
    pub empirical: Vec<f64>,
    pub models: Vec<(String, Vec<f64>)>,
}

impl Overlay {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["bin_center".to_string(), "empirical_density".to_string()];
        header.extend(self.models.iter().map(|(m, _)| m.clone()));
        w.write_record(&header)?;
        for i in 0..self.centers.len() {
            let mut row = vec![format!("{:.9e}", self.centers[i]), format!("{:.9e}", self.empirical[i])];
            row.extend(self.models.iter().map(|(_, d)| format!("{:.9e}", d[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn histogram_overlay(returns: &[f64], bins: usize, fits: &[(&str, &ModelParams)]) -> Result<Overlay, GofError> {
    if bins < MIN_HISTOGRAM_BINS {
        return Err(GofError::Precondition(format!(
            "histogram needs at least {MIN_HISTOGRAM_BINS} bins, got {bins}"
        )));
    }
    if returns.is_empty() || returns.iter().any(|x| !x.is_finite()) {
        return Err(GofError::Precondition("histogram needs finite data".into()));
    }
    let lo = returns.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = returns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(ReturnsError::ZeroVariance.into());
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in returns {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = returns.len() as f64;
    let centers: Vec<f64> = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let empirical = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let models = fits
        .iter()
        .map(|(name, p)| Ok((name.to_string(), model_density(p, &centers)?)))
        .collect::<Result<_, GofError>>()?;
    Ok(Overlay {
        bin_width: width,
        centers,
        empirical,
        models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{draw_normal, RngStream};

    #[test]
    fn empirical_mass_is_one() {
        let x = draw_normal(&RngStream::new(1, 0), 5000);
        for bins in [10, 37, 100] {
            let o = histogram_overlay(&x, bins, &[]).unwrap();
            let mass: f64 = o.empirical.iter().sum::<f64>() * o.bin_width;
            assert!((mass - 1.0).abs() < 1e-9);
        }
        assert!(histogram_overlay(&x, 9, &[]).is_err());
    }

    #[test]
    fn gaussian_column_tracks_histogram() {
        let x = draw_normal(&RngStream::new(2, 0), 100_000);
        let p = ModelParams::Gaussian { mu: 0.0, sigma: 1.0 };
        let o = histogram_overlay(&x, 40, &[("gaussian", &p)]).unwrap();
        let gap = o
            .empirical
            .iter()
            .zip(&o.models[0].1)
            .map(|(e, g)| (e - g).abs())
            .fold(0.0, f64::max);
        assert!(gap < 0.02, "{gap}");
        let mut out = Vec::new();
        o.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("bin_center,empirical_density,gaussian\n"));
        assert_eq!(text.lines().count(), 41);
    }

    #[test]
    fn fit_report_keeps_failed_rows() {
        let x = draw_normal(&RngStream::new(3, 0), 50);
        let r = fit_report(&x, "t", 0, &ModelKind::ALL).unwrap();
        assert!(matches!(r.models[0], ModelFit::Fitted { .. }));
        assert!(matches!(r.models[1], ModelFit::Failed { .. }));
        assert!(matches!(r.models[2], ModelFit::Failed { .. }));
    }
}
