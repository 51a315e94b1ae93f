//! Normal variance-mean mixture with inverse-Gaussian mixing
//! (Michael–Schucany–Haas variates for the mixing law).

use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_distr::StandardNormal;

use super::NigParams;
use crate::numerics::RngStream;

/// Inverse Gaussian with mean `m` and shape `lambda`.
fn inverse_gaussian<R: Rng + ?Sized>(m: f64, lambda: f64, rng: &mut R) -> f64 {
    let nu: f64 = StandardNormal.sample(rng);
    let y = nu * nu;
    let my = m * y;
    // Smaller root of the quadratic, in cancellation-free form.
    let x = m - 2.0 * m * my / ((4.0 * m * lambda * y + my * my).sqrt() + my);
    let u: f64 = Open01.sample(rng);
    if u <= m / (m + x) {
        x
    } else {
        m * m / x
    }
}

pub(crate) fn draw<R: Rng + ?Sized>(p: &NigParams, rng: &mut R) -> f64 {
    let v = inverse_gaussian(p.delta / p.gamma(), p.delta * p.delta, rng);
    let z: f64 = StandardNormal.sample(rng);
    p.mu + p.beta * v + v.sqrt() * z
}

pub fn nig_sample(n: usize, p: &NigParams, stream: &RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..n).map(|_| draw(p, &mut rng)).collect()
}
