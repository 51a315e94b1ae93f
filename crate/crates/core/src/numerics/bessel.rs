//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! For `x <= 2` the pair `(K0, K1)` comes from Temme's power series; above
//! that it comes from Steed's evaluation of the continued fraction for
//! `K1/K0` (Thompson & Barnett), which yields exponentially scaled values
//! directly. Both branches run to machine precision.

use std::f64::consts::PI;

use super::NumericsError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
const MAX_ITER: usize = 10_000;

/// Order of the Bessel function. `K_{-1} = K_1`, so negative orders map here too.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

impl TryFrom<i32> for BesselOrder {
    type Error = NumericsError;

    fn try_from(order: i32) -> Result<Self, Self::Error> {
        match order {
            0 => Ok(Self::Zero),
            1 | -1 => Ok(Self::One),
            other => Err(NumericsError::Domain(format!(
                "bessel_k supports orders 0 and +/-1, got {other}"
            ))),
        }
    }
}

/// Temme series for `(K0(x), K1(x))`, valid for `0 < x <= 2`.
fn temme_k01(x: f64) -> (f64, f64) {
    // Order-zero specialisation: Gamma(1 +/- v) - 1 vanish, sin(pi v)/(pi v) -> 1.
    let a = (0.5 * x).ln();
    let mut p = 0.5;
    let mut q = 0.5;
    let mut f = -EULER_GAMMA - a;
    let mut coef = 1.0;
    let mut sum = f;
    let mut sum1 = p;
    let quarter_x2 = 0.25 * x * x;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        f = (kf * f + p + q) / (kf * kf);
        p /= kf;
        q /= kf;
        let h = p - kf * f;
        coef *= quarter_x2 / kf;
        sum += coef * f;
        sum1 += coef * h;
        if (coef * f).abs() < sum.abs() * f64::EPSILON {
            break;
        }
    }
    (sum, 2.0 * sum1 / x)
}

/// Steed's algorithm for the scaled pair `(e^x K0(x), e^x K1(x))`, `x > 1`.
fn steed_k01_scaled(x: f64) -> (f64, f64) {
    let v2 = -0.25; // v^2 - 1/4 at v = 0
    let mut a = v2;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = -a;
    let mut c = -a;
    let mut s = 1.0 + q * delta;
    for k in 2..MAX_ITER {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (b + a * d);
        delta *= b * d - 1.0;
        f += delta;
        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;
        if (q * delta).abs() < s.abs() * f64::EPSILON * 0.5 {
            break;
        }
    }
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (0.5 + x + v2 * f) / x;
    (k0, k1)
}

/// Exponentially scaled `e^x K_order(x)`; finite for every representable `x > 0`
/// except where `K_1(x) ~ 1/x` itself overflows.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64, NumericsError> {
    if !(x > 0.0) || x.is_nan() {
        return Err(NumericsError::Domain(format!("bessel_k requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let (k0, k1) = if x <= 2.0 {
        let (k0, k1) = temme_k01(x);
        let s = x.exp();
        (k0 * s, k1 * s)
    } else {
        steed_k01_scaled(x)
    };
    let value = match order {
        BesselOrder::Zero => k0,
        BesselOrder::One => k1,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(NumericsError::Overflow(format!("K_{order:?}({x}) overflows f64")))
    }
}

/// `K_order(x)` for `x > 0`. Underflows gracefully to 0 for `x` beyond ~745.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64, NumericsError> {
    if x > 0.0 && x <= 2.0 {
        let (k0, k1) = temme_k01(x);
        let value = if order == BesselOrder::Zero { k0 } else { k1 };
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(NumericsError::Overflow(format!("K_{order:?}({x}) overflows f64")))
        };
    }
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}

/// `ln K_order(x)`, accurate where `K` itself under- or overflows.
pub fn ln_bessel_k(order: BesselOrder, x: f64) -> Result<f64, NumericsError> {
    if x > 0.0 && x <= 2.0 {
        return Ok(bessel_k(order, x)?.ln());
    }
    Ok(bessel_k_scaled(order, x)?.ln() - x)
}
