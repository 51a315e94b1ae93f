//! Chi-square distribution tails, backed by the regularized incomplete gamma
//! functions from `statrs`.

use statrs::function::gamma::{checked_gamma_lr, checked_gamma_ur};

use super::NumericsError;

fn check(x: f64, dof: u32) -> Result<(), NumericsError> {
    if dof == 0 {
        return Err(NumericsError::Domain("chi-square needs dof >= 1".into()));
    }
    if !(x >= 0.0) {
        return Err(NumericsError::Domain(format!(
            "chi-square argument must be >= 0, got {x}"
        )));
    }
    Ok(())
}

/// `P(chi2_dof > x)`.
pub fn chi_square_sf(x: f64, dof: u32) -> Result<f64, NumericsError> {
    check(x, dof)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    checked_gamma_ur(0.5 * dof as f64, 0.5 * x)
        .map_err(|e| NumericsError::Domain(e.to_string()))
}

/// `P(chi2_dof <= x)`.
pub fn chi_square_cdf(x: f64, dof: u32) -> Result<f64, NumericsError> {
    check(x, dof)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    checked_gamma_lr(0.5 * dof as f64, 0.5 * x)
        .map_err(|e| NumericsError::Domain(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_adaptive, QuadratureSpec};
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn zero_has_full_mass_above() {
        for k in [1, 2, 5, 15, 100] {
            assert_eq!(chi_square_sf(0.0, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn pearson_example_against_density_quadrature() {
        // Integrate the 15-dof density over [0, 16.27] independently of the gamma routines.
        let k = 15.0_f64;
        let ln_norm = -(0.5 * k) * 2f64.ln() - ln_gamma(0.5 * k);
        let density = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                (ln_norm + (0.5 * k - 1.0) * x.ln() - 0.5 * x).exp()
            }
        };
        let spec = QuadratureSpec::new(1e-14, 1e-13, 2000).unwrap();
        let cdf = integrate_adaptive(density, 0.0, 16.27, &spec).unwrap();
        let sf = chi_square_sf(16.27, 15).unwrap();
        assert!((sf - (1.0 - cdf)).abs() < 1e-10, "{sf} vs {}", 1.0 - cdf);
        assert!((sf - 0.364).abs() < 5e-4, "{sf}");
    }

    #[test]
    fn two_dof_closed_form() {
        let sf = chi_square_sf(161.9, 2).unwrap();
        assert!(sf < 1e-30);
        let closed = (-161.9f64 / 2.0).exp();
        assert!(((sf - closed) / closed).abs() < 1e-9, "{sf} vs {closed}");
    }

    #[test]
    fn dof_zero_is_domain_error() {
        assert!(chi_square_sf(1.0, 0).is_err());
        assert!(chi_square_sf(-1.0, 3).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sf_and_cdf_partition_unity(x in 0.0f64..200.0, k in 1u32..120) {
                let s = chi_square_sf(x, k).unwrap();
                let c = chi_square_cdf(x, k).unwrap();
                prop_assert!((s + c - 1.0).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&s));
            }

            #[test]
            fn sf_decreasing(x in 0.0f64..100.0, dx in 0.01f64..10.0, k in 1u32..60) {
                prop_assert!(chi_square_sf(x + dx, k).unwrap() <= chi_square_sf(x, k).unwrap());
            }
        }
    }
}
