//! Alpha-stable laws: characteristic function, density and distribution
//! function, Chambers–Mallows–Stuck sampling, likelihood and estimation.

mod cf;
mod density;
mod fit;
mod grid;
mod params;
mod sample;
mod series;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use cf::stable_cf;
pub use density::{stable_cdf, stable_pdf, FAR_TAIL};
pub use fit::{
    grid_loglik, quantile_fit, quantile_fit_sorted, stable_fit_mle, stable_fit_quantile,
    stable_loglik, FitMethod, StableFitResult, MIN_FIT_OBSERVATIONS,
};
pub use grid::StableGrid;
pub use params::{StableParams, UNIT_ALPHA_EPS};
pub use sample::{stable_sample, stable_sample_into};

#[derive(Debug, Error)]
pub enum StableError {
    #[error("invalid stable parameters: {0}")]
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
