//! Shared numerical primitives.

pub mod bessel;
pub mod chisq;
pub mod fft;
pub mod optim;
pub mod quadrature;
pub mod rng;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k, BesselOrder};
pub use chisq::{chi_square_cdf, chi_square_sf};
pub use optim::{nelder_mead_minimize, Minimum, NelderMeadOptions};
pub use quadrature::{integrate_adaptive, integrate_with_breaks, Integral, QuadratureSpec};
pub use rng::{draw_exponential, draw_normal, draw_uniform, RngStream, StreamRng};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("integrand or objective not finite near {at}")]
    NonFinite { at: f64 },
    #[error("quadrature did not converge (estimate {estimate}, error bound {abs_error})")]
    NonConvergence { estimate: f64, abs_error: f64 },
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}
