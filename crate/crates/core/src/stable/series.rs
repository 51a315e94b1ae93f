//! Far-tail asymptotic expansion of the standard S1 density,
//! `f(z) ~ sum_k a_k z^(-k alpha - 1)` as `z -> +inf`, obtained by expanding
//! `exp(-c t^alpha e^{-i theta})` term by term in the inversion integral.
//! The left tail follows from `f(-z; beta) = f(z; -beta)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::params::{is_unit_alpha, s0_shift};

const MAX_TERMS: usize = 40;
/// Above this `|beta tan(pi alpha / 2)|` the expansion about the S1 origin
/// converges too slowly at the grid edge; only the leading term, measured
/// from the S0 centre, is used.
const MAX_SKEW_SHIFT: f64 = 4.0;
/// The full expansion is still used once `|z|^alpha` exceeds this multiple
/// of the skew shift, where its terms fall off quickly.
const SERIES_MARGIN: f64 = 10.0;

#[derive(Debug, Clone)]
struct OneSide {
    coeffs: Vec<f64>,
    magnitudes: Vec<f64>,
}

impl OneSide {
    fn new(alpha: f64, beta: f64) -> Self {
        let tan = (0.5 * PI * alpha).tan();
        let theta = (beta * tan).atan();
        let ln_c = 0.5 * (beta * tan).mul_add(beta * tan, 1.0).ln();
        let mut coeffs = Vec::with_capacity(MAX_TERMS);
        let mut magnitudes = Vec::with_capacity(MAX_TERMS);
        for k in 1..=MAX_TERMS {
            let kf = k as f64;
            let ln_mag = kf * ln_c + ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) - PI.ln();
            let mag = ln_mag.exp();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(sign * mag * (kf * (theta + 0.5 * PI * alpha)).sin());
            magnitudes.push(mag);
        }
        Self { coeffs, magnitudes }
    }

    /// `(density, survival)` at `z > 0`.
    fn eval(&self, alpha: f64, z: f64) -> (f64, f64) {
        let lz = z.ln();
        let mut density = 0.0;
        let mut survival = 0.0;
        let mut prev_mag = f64::INFINITY;
        for (k, (&a, &m)) in self.coeffs.iter().zip(&self.magnitudes).enumerate() {
            let ka = (k + 1) as f64 * alpha;
            let w = (-ka * lz).exp();
            let mag = m * w;
            // Divergent (alpha > 1) series: stop at the smallest term.
            if mag > prev_mag {
                break;
            }
            density += a * w;
            survival += a * w / ka;
            if mag < 1e-17 * survival.abs().max(1e-300) {
                break;
            }
            prev_mag = mag;
        }
        (density / z, survival)
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ZETA3: f64 = 1.202_056_903_159_594_3;

/// `(psi, psi', psi'')` at a positive integer.
fn polygamma_at(n: usize) -> [f64; 3] {
    let mut p = [-EULER_GAMMA, PI * PI / 6.0, -2.0 * ZETA3];
    for k in 1..n {
        let kf = k as f64;
        p[0] += 1.0 / kf;
        p[1] -= 1.0 / (kf * kf);
        p[2] += 2.0 / (kf * kf * kf);
    }
    p
}

/// Right-tail `(density, survival)` at `x > 0` for `alpha = 1`, from the
/// Mellin transform of `t^k (1 + i c ln t)^k exp(-ixt)`, `c = 2 beta / pi`,
/// through third order; each order carries powers of `ln x`.
fn unit_alpha_tail(beta: f64, x: f64) -> (f64, f64) {
    let c = 2.0 / PI * beta;
    let log_ix = Complex64::new(x.ln(), 0.5 * PI);
    let ic = Complex64::new(0.0, c);
    // D^j [Gamma(s) exp(-s L)] / G at integer s, via complete Bell polynomials.
    let bell = |s: usize| -> [Complex64; 4] {
        let [p0, p1, p2] = polygamma_at(s);
        let a1 = Complex64::new(p0, 0.0) - log_ix;
        [
            Complex64::new(1.0, 0.0),
            a1,
            a1 * a1 + p1,
            a1 * a1 * a1 + 3.0 * a1 * p1 + p2,
        ]
    };
    let g = |s: usize| -> Complex64 {
        let fact: f64 = (1..s).map(|k| k as f64).product();
        fact * (-(s as f64) * log_ix).exp()
    };
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut density = Complex64::new(0.0, 0.0);
    let mut survival = Complex64::new(0.0, 0.0);
    let mut kfact = 1.0;
    for k in 1..=3usize {
        kfact *= k as f64;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 } / kfact;
        let (bd, bs) = (bell(k + 1), bell(k));
        let (mut sd, mut ss) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut icj = Complex64::new(1.0, 0.0);
        for j in 0..=k {
            sd += binom[k][j] * icj * bd[j];
            ss += binom[k][j] * icj * bs[j];
            icj *= ic;
        }
        density += sign * g(k + 1) * sd;
        survival += sign * g(k) * ss;
    }
    let survival = survival / Complex64::new(0.0, 1.0);
    (density.re / PI, survival.re / PI)
}

/// Precomputed tail expansion for one `(alpha, beta)`.
#[derive(Debug, Clone)]
pub(crate) struct TailSeries {
    alpha: f64,
    beta: f64,
    centre: f64,
    right: OneSide,
    left: OneSide,
}

impl TailSeries {
    pub(crate) fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            centre: s0_shift(alpha, beta),
            right: OneSide::new(alpha, beta),
            left: OneSide::new(alpha, -beta),
        }
    }

    /// `(density, tail mass beyond z)`; for `z > 0` the mass is `P(Z > z)`,
    /// for `z < 0` it is `P(Z < z)`.
    pub(crate) fn eval(&self, z: f64) -> (f64, f64) {
        if is_unit_alpha(self.alpha) {
            let w = z.abs();
            if self.beta == 0.0 {
                return (1.0 / (PI * (1.0 + z * z)), 0.5 - w.atan() / PI);
            }
            let beta = if z > 0.0 { self.beta } else { -self.beta };
            return unit_alpha_tail(beta, w);
        }
        if self.centre.abs() > MAX_SKEW_SHIFT
            && z.abs().powf(self.alpha) < SERIES_MARGIN * self.centre.abs()
        {
            return self.leading_only(z - self.centre);
        }
        if z > 0.0 {
            self.right.eval(self.alpha, z)
        } else {
            self.left.eval(self.alpha, -z)
        }
    }

    pub(crate) fn is_accurate(&self) -> bool {
        self.centre.abs() <= MAX_SKEW_SHIFT
    }

    fn leading_only(&self, x: f64) -> (f64, f64) {
        let a = if x > 0.0 { self.right.coeffs[0] } else { self.left.coeffs[0] };
        let w = x.abs();
        let tail = a * w.powf(-self.alpha);
        (tail / w, tail / self.alpha)
    }

    pub(crate) fn density(&self, z: f64) -> f64 {
        self.eval(z).0
    }

    /// Leading coefficient on the side of `sign`.
    pub(crate) fn leading(&self, sign: f64) -> f64 {
        if is_unit_alpha(self.alpha) {
            (1.0 + sign * self.beta) / PI
        } else if sign > 0.0 {
            self.right.coeffs[0]
        } else {
            self.left.coeffs[0]
        }
    }
}
