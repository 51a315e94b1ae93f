use serde::Serialize;

use super::GofError;
use crate::numerics::chi_square_sf;

pub const MIN_CHI2_OBSERVATIONS: usize = 50;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub stat: f64,
    pub dof: u32,
    pub p_value: f64,
    pub bins: usize,
}

/// Default bin count `round(2 n^(2/5))`, capped so each bin expects at least five points.
pub fn default_bins(n: usize) -> usize {
    let b = (2.0 * (n as f64).powf(0.4)).round() as usize;
    b.min((n as f64 / MIN_EXPECTED).floor() as usize)
}

/// Pearson statistic on bins that are equiprobable under the fitted model,
/// given the model cdf at each observation.
pub fn pearson_chi_square(cdf_values: &[f64], n_params: usize, bins: Option<usize>) -> Result<ChiSquare, GofError> {
    let n = cdf_values.len();
    if n < MIN_CHI2_OBSERVATIONS {
        return Err(GofError::Precondition(format!(
            "chi-square test needs at least {MIN_CHI2_OBSERVATIONS} observations, got {n}"
        )));
    }
    let b = bins.unwrap_or_else(|| default_bins(n));
    let expected = n as f64 / b as f64;
    if b < n_params + 2 || expected < MIN_EXPECTED {
        return Err(GofError::TooFewBins {
            bins: b,
            needed: n_params + 2,
        });
    }
    let mut counts = vec![0usize; b];
    for &u in cdf_values {
        let k = ((u * b as f64).floor().max(0.0) as usize).min(b - 1);
        counts[k] += 1;
    }
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = (b - 1 - n_params) as u32;
    Ok(ChiSquare {
        stat,
        dof,
        p_value: chi_square_sf(stat, dof)?,
        bins: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{draw_uniform, RngStream};

    #[test]
    fn bin_rule() {
        assert_eq!(default_bins(2502), 46);
        assert_eq!(default_bins(50), 10);
        assert!(matches!(pearson_chi_square(&[0.5; 60], 4, Some(5)), Err(GofError::TooFewBins { .. })));
        assert!(pearson_chi_square(&[0.5; 49], 0, None).is_err());
    }

    #[test]
    fn null_distribution() {
        // Uniform cdf values: stat ~ chi^2(bins - 1), p ~ U(0, 1).
        let seeds = 200;
        let mut mean_stat = 0.0;
        let mut small_p = 0;
        let mut dof = 0;
        for s in 0..seeds {
            let u = draw_uniform(&RngStream::new(77, s), 2000);
            let c = pearson_chi_square(&u, 0, None).unwrap();
            mean_stat += c.stat / seeds as f64;
            dof = c.dof;
            if c.p_value < 0.1 {
                small_p += 1;
            }
        }
        // sd of the mean is sqrt(2 dof / seeds).
        assert!((mean_stat - dof as f64).abs() < 4.0 * (2.0 * dof as f64 / seeds as f64).sqrt(), "{mean_stat} vs {dof}");
        // Binomial(200, 0.1): 20 +/- 4.2
        assert!((8..=34).contains(&small_p), "{small_p}");
    }
}
