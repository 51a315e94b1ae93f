use super::GofError;

/// Two-sided KS distance from model cdf values at the ascending sample.
pub fn ks_from_cdf_values(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs()))
        .fold(0.0, f64::max)
}

/// `D = max_i max(|F(x_i) - (i-1)/n|, |i/n - F(x_i)|)` over ascending data.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, GofError> {
    if sorted.is_empty() {
        return Err(GofError::Precondition("KS statistic needs at least one point".into()));
    }
    check_sorted(sorted)?;
    let u: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    Ok(ks_from_cdf_values(&u))
}

pub(crate) fn check_sorted(x: &[f64]) -> Result<(), GofError> {
    if let Some(i) = x.windows(2).position(|w| !(w[0] <= w[1])) {
        return Err(GofError::Unsorted { index: i + 1 });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed() {
        let d = ks_statistic(&[0.25, 0.75], |x| x).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        assert_eq!(ks_statistic(&[0.5], |x| x).unwrap(), 0.5);
        let n = 40;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_statistic(&x, |x| x).unwrap() - 0.5 / n as f64).abs() < 1e-15);
        assert!(matches!(ks_statistic(&[0.3, 0.2], |x| x), Err(GofError::Unsorted { index: 1 })));
    }

    proptest! {
        #[test]
        fn matches_dense_grid_sup(mut x in prop::collection::vec(0.0f64..1.0, 1..60)) {
            x.sort_by(f64::total_cmp);
            let d = ks_statistic(&x, |v| v).unwrap();
            let n = x.len() as f64;
            let mut brute: f64 = 0.0;
            let m = 20_000;
            for k in 0..=m {
                let t = k as f64 / m as f64;
                let emp = x.partition_point(|&v| v <= t) as f64 / n;
                brute = brute.max((emp - t).abs());
            }
            prop_assert!(d >= brute - 1e-12);
            prop_assert!(d <= brute + 1.0 / (2.0 * n) + 1.0 / m as f64);
        }
    }
}
