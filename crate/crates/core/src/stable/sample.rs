//! Chambers–Mallows–Stuck generator (Weron's form for the S1 parameterisation).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_distr::Exp1;

use super::params::StableParams;
use crate::numerics::RngStream;

/// One standard S1 variate from `V ~ U(-pi/2, pi/2)` and `W ~ Exp(1)`.
fn cms_standard(alpha: f64, beta: f64, v: f64, w: f64) -> f64 {
    if (alpha - 2.0).abs() < f64::EPSILON {
        // Gaussian with variance 2.
        return 2.0 * w.sqrt() * v.sin();
    }
    if super::params::is_unit_alpha(alpha) {
        let a = FRAC_PI_2 + beta * v;
        return 2.0 / PI * (a * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / a).ln());
    }
    let bt = beta * (0.5 * PI * alpha).tan();
    let b = bt.atan() / alpha;
    let s = (1.0 + bt * bt).powf(0.5 / alpha);
    let av = alpha * (v + b);
    s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

pub(crate) fn draw<R: Rng + ?Sized>(p: &StableParams, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let v = PI * (u - 0.5);
    let w: f64 = Exp1.sample(rng);
    p.standard_offset() + p.gamma * cms_standard(p.alpha, p.beta, v, w)
}

/// `n` variates of `p` drawn from `stream`.
pub fn stable_sample(n: usize, p: &StableParams, stream: &RngStream) -> Vec<f64> {
    let mut out = vec![0.0; n];
    stable_sample_into(&mut out, p, stream);
    out
}

pub fn stable_sample_into(out: &mut [f64], p: &StableParams, stream: &RngStream) {
    let mut rng = stream.rng();
    for x in out.iter_mut() {
        *x = draw(p, &mut rng);
    }
}
