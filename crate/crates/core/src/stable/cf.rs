use std::f64::consts::PI;

use num_complex::Complex64;

use super::params::{is_unit_alpha, StableParams};

/// `log phi(t)` of the standard S1 law (`gamma = 1`, `mu = 0`).
pub(crate) fn log_cf_standard(t: f64, alpha: f64, beta: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let at = t.abs();
    if is_unit_alpha(alpha) {
        Complex64::new(-at, -2.0 / PI * beta * t * at.ln())
    } else {
        let ta = at.powf(alpha);
        Complex64::new(-ta, beta * (0.5 * PI * alpha).tan() * ta * t.signum())
    }
}

/// Phase of the standard S0 characteristic function at `t > 0`,
/// `beta tan(pi alpha / 2) (t^alpha - t)`, written so it stays accurate (and
/// tends to the `alpha = 1` branch) as `alpha -> 1`.
pub(crate) fn s0_phase(t: f64, alpha: f64, beta: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if is_unit_alpha(alpha) {
        -2.0 / PI * beta * t * t.ln()
    } else {
        beta * (0.5 * PI * alpha).tan() * t * ((alpha - 1.0) * t.ln()).exp_m1()
    }
}

/// Characteristic function `E[exp(i t X)]`.
pub fn stable_cf(t: f64, p: &StableParams) -> Complex64 {
    let c = p.standard_offset();
    (log_cf_standard(p.gamma * t, p.alpha, p.beta) + Complex64::new(0.0, c * t)).exp()
}
