use super::GofError;

/// Anderson–Darling test of normality with estimated mean and variance:
/// returns the adjusted statistic `A^2 (1 + 0.75/n + 2.25/n^2)` and its
/// approximate p-value (D'Agostino & Stephens, case 3).
pub fn anderson_darling_normal(data: &[f64], mu: f64, sigma: f64) -> Result<(f64, f64), GofError> {
    let n = data.len();
    if n < 8 {
        return Err(GofError::Precondition(format!(
            "Anderson-Darling needs at least 8 observations, got {n}"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(GofError::Precondition(format!("sigma must be positive, got {sigma}")));
    }
    let mut z: Vec<f64> = data.iter().map(|&x| (x - mu) / sigma).collect();
    z.sort_by(f64::total_cmp);
    let nf = n as f64;
    let ln_cdf = |v: f64| crate::numerics::normal_cdf(v).ln();
    let mut s = 0.0;
    for i in 0..n {
        // ln F(z_i) + ln(1 - F(z_{n-1-i})), the latter as ln F(-z).
        s += (2 * i + 1) as f64 * (ln_cdf(z[i]) + ln_cdf(-z[n - 1 - i]));
    }
    let a2 = -nf - s / nf;
    let adj = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    Ok((adj, case3_p_value(adj)))
}

fn case3_p_value(a: f64) -> f64 {
    let p = if a >= 0.6 {
        // The quadratic turns upward past its vertex; beyond it p is zero anyway.
        let a = a.min(153.47);
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    p.clamp(0.0, 1.0)
}
