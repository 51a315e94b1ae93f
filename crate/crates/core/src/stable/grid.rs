//! Tabulated density and distribution function on a uniform grid, built by
//! one FFT inversion of the characteristic function.
//!
//! The grid covers 100 standardized units centred on the S0 location. The
//! periodic images introduced by sampling the characteristic function are
//! removed with the tail expansion, and values outside the grid come from the
//! expansion directly. Accuracy degrades for `alpha` within about 0.02 of 1
//! when `beta != 0`, where the tail expansion converges slowly.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::cf::s0_phase;
use super::density::{standard_cdf_quadrature, standard_pdf_quadrature};
use super::params::{s0_shift, StableParams};
use super::series::TailSeries;
use super::StableError;
use crate::numerics::fft::fft_forward;
use crate::numerics::QuadratureSpec;

const N: usize = 8192;
const SPAN: f64 = 100.0;
const IMAGES: usize = 40;
const ALIAS_NODES: usize = 65;
const NEAR_IMAGES: usize = 2;
const NEAR_NODES: usize = 33;
/// `exp(-740)` is below the smallest normal double.
const CF_EXPONENT_CUTOFF: f64 = 740.0;

#[derive(Debug, Clone)]
pub struct StableGrid {
    params: StableParams,
    series: TailSeries,
    z0: f64,
    h: f64,
    /// Density at nodes `-1..=N+1`; index `j + 1` holds node `j`.
    pdf: Vec<f64>,
    /// Distribution function at nodes `0..=N`.
    cdf: Vec<f64>,
}

fn lagrange_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Local cubic interpolation through equally spaced samples.
struct Coarse {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
}

impl Coarse {
    fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = (x - self.x0) / self.dx;
        // Window of nodes i-1..=i+2, shifted inward at the ends.
        let i = (s.floor() as isize).clamp(1, n as isize - 3) as usize;
        let w = lagrange_weights(s - i as f64);
        w[0] * self.y[i - 1] + w[1] * self.y[i] + w[2] * self.y[i + 1] + w[3] * self.y[i + 2]
    }
}

impl StableGrid {
    pub fn new(params: &StableParams) -> Result<Self, StableError> {
        Self::build(params, true)
    }

    /// Skips the direct integration of near images; pdf errors near
    /// `alpha = 1` grow to about 1e-6, which is harmless for quantiles.
    pub(crate) fn coarse(params: &StableParams) -> Result<Self, StableError> {
        Self::build(params, false)
    }

    fn build(params: &StableParams, refine: bool) -> Result<Self, StableError> {
        params.validate()?;
        let (alpha, beta) = (params.alpha, params.beta);
        let series = TailSeries::new(alpha, beta);
        let zc = s0_shift(alpha, beta);
        let h = SPAN / N as f64;
        let z0 = zc - 0.5 * SPAN;
        let dt = 2.0 * PI / SPAN;

        // buf[k] = phi(t_k) exp(-i t_k z0), t_k = (k - N/2) dt.
        let half = N / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); N];
        buf[half] = Complex64::new(1.0, 0.0);
        for k in 1..=half {
            let t = k as f64 * dt;
            let ta = t.powf(alpha);
            if ta > CF_EXPONENT_CUTOFF {
                break;
            }
            let v = Complex64::from_polar((-ta).exp(), s0_phase(t, alpha, beta) + 0.5 * SPAN * t);
            if k < half {
                buf[half + k] = v;
            }
            buf[half - k] = v.conj();
        }
        fft_forward(&mut buf);

        let scale = dt / (2.0 * PI);
        let mut pdf = vec![0.0; N + 3];
        for (j, v) in buf.iter().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            pdf[j + 1] = sign * v.re * scale;
        }

        // Remove the periodic images, smoothed over coarse nodes.
        let a_r = series.leading(1.0);
        let a_l = series.leading(-1.0);
        let far = (IMAGES as f64 + 0.5) * SPAN;
        let spec = QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 100_000,
        };
        // Where the expansion is poor, the nearest images are integrated
        // directly instead.
        let near = if series.is_accurate() || !refine { 0 } else { NEAR_IMAGES };
        let alias = |z: f64| -> f64 {
            let mut total = 0.0;
            for m in near + 1..=IMAGES {
                let shift = m as f64 * SPAN;
                total += series.density(z + shift) + series.density(z - shift);
            }
            total
                + a_r * (z + far).powf(-alpha) / (alpha * SPAN)
                + a_l * (far - z).powf(-alpha) / (alpha * SPAN)
        };
        let coarse_dx = SPAN / (ALIAS_NODES - 1) as f64;
        let coarse: Vec<f64> = (0..ALIAS_NODES)
            .map(|i| alias(z0 + i as f64 * coarse_dx))
            .collect();
        let spline = Coarse {
            x0: z0,
            dx: coarse_dx,
            y: coarse,
        };
        let near_fix = if near == 0 {
            None
        } else {
            let dx = SPAN / (NEAR_NODES - 1) as f64;
            let fix = (0..NEAR_NODES)
                .map(|i| {
                    let z = z0 + i as f64 * dx;
                    let mut d = 0.0;
                    for m in 1..=near {
                        let shift = m as f64 * SPAN;
                        d += standard_pdf_quadrature(z + shift, alpha, beta, &spec)?
                            + standard_pdf_quadrature(z - shift, alpha, beta, &spec)?;
                    }
                    Ok(d)
                })
                .collect::<Result<Vec<f64>, StableError>>()?;
            Some(Coarse { x0: z0, dx, y: fix })
        };
        for j in 0..N {
            let z = z0 + j as f64 * h;
            let fix = near_fix.as_ref().map_or(0.0, |s| s.eval(z));
            pdf[j + 1] = (pdf[j + 1] - spline.eval(z) - fix).max(0.0);
        }
        let edge = |z: f64| -> Result<f64, StableError> {
            if series.is_accurate() {
                Ok(series.density(z).max(0.0))
            } else {
                standard_pdf_quadrature(z, alpha, beta, &spec)
            }
        };
        pdf[0] = edge(z0 - h)?;
        pdf[N + 1] = edge(z0 + N as f64 * h)?;
        pdf[N + 2] = edge(z0 + (N + 1) as f64 * h)?;

        let f = |j: usize| pdf[j + 1];
        let mut cdf = vec![0.0; N + 1];
        let (lower_mass, upper_mass) = if series.is_accurate() {
            (series.eval(z0).1, series.eval(z0 + SPAN).1)
        } else {
            (
                standard_cdf_quadrature(z0, alpha, beta, &spec)?,
                1.0 - standard_cdf_quadrature(z0 + SPAN, alpha, beta, &spec)?,
            )
        };
        cdf[0] = lower_mass.clamp(0.0, 1.0);
        for j in 0..N {
            // Fourth-order cumulative rule on [z_j, z_{j+1}].
            let inc = h / 24.0 * (-pdf[j] + 13.0 * f(j) + 13.0 * f(j + 1) - pdf[j + 3]);
            cdf[j + 1] = cdf[j] + inc;
        }
        let target = 1.0 - upper_mass.clamp(0.0, 1.0);
        let drift = target - cdf[N];
        for (j, c) in cdf.iter_mut().enumerate() {
            *c = (*c + drift * j as f64 / N as f64).clamp(0.0, 1.0);
        }
        // Quadrature noise must not make the tabulated cdf decrease.
        for j in 1..=N {
            if cdf[j] < cdf[j - 1] {
                cdf[j] = cdf[j - 1];
            }
        }

        Ok(Self {
            params: *params,
            series,
            z0,
            h,
            pdf,
            cdf,
        })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    fn z_end(&self) -> f64 {
        self.z0 + N as f64 * self.h
    }

    /// Density of the standard law.
    pub(crate) fn pdf_std(&self, z: f64) -> f64 {
        if !(z >= self.z0 && z < self.z_end()) {
            if z.is_nan() {
                return f64::NAN;
            }
            return self.series.density(z).max(0.0);
        }
        let s = (z - self.z0) / self.h;
        let j = (s.floor() as usize).min(N - 1);
        let w = lagrange_weights(s - j as f64);
        let v = w[0] * self.pdf[j] + w[1] * self.pdf[j + 1] + w[2] * self.pdf[j + 2] + w[3] * self.pdf[j + 3];
        v.max(0.0)
    }

    pub(crate) fn cdf_std(&self, z: f64) -> f64 {
        if z.is_nan() {
            return f64::NAN;
        }
        if z < self.z0 {
            return self.series.eval(z).1.clamp(0.0, self.cdf[0]);
        }
        if z >= self.z_end() {
            return (1.0 - self.series.eval(z).1).clamp(self.cdf[N], 1.0);
        }
        let s = (z - self.z0) / self.h;
        let j = (s.floor() as usize).min(N - 1);
        self.hermite(j, s - j as f64)
    }

    fn hermite(&self, j: usize, t: f64) -> f64 {
        let (f0, f1) = (self.cdf[j], self.cdf[j + 1]);
        let (d0, d1) = (self.pdf[j + 1] * self.h, self.pdf[j + 2] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * d1;
        v.clamp(f0, f1)
    }

    /// Quantile of the standard law; `None` when `q` falls outside the grid.
    pub(crate) fn quantile_std(&self, q: f64) -> Option<f64> {
        if !(q > self.cdf[0] && q < self.cdf[N]) {
            return None;
        }
        // First node whose cdf reaches q.
        let hi = self.cdf.partition_point(|&c| c < q);
        let j = hi.saturating_sub(1).min(N - 1);
        let (mut lo_t, mut hi_t) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo_t + hi_t);
            if self.hermite(j, mid) < q {
                lo_t = mid;
            } else {
                hi_t = mid;
            }
        }
        Some(self.z0 + (j as f64 + 0.5 * (lo_t + hi_t)) * self.h)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.pdf_std(self.params.standardize(x)) / self.params.gamma
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match x {
            f64::NEG_INFINITY => 0.0,
            f64::INFINITY => 1.0,
            _ => self.cdf_std(self.params.standardize(x)),
        }
    }

    /// Quantile by inversion of the tabulated cdf, falling back to bisection
    /// on the tail expansion beyond the grid.
    pub fn quantile(&self, q: f64) -> Result<f64, StableError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(StableError::InvalidParams(format!("quantile level must lie in (0, 1), got {q}")));
        }
        let z = match self.quantile_std(q) {
            Some(z) => z,
            None => self.tail_quantile(q),
        };
        Ok(self.params.standard_offset() + self.params.gamma * z)
    }

    fn tail_quantile(&self, q: f64) -> f64 {
        let (mut lo, mut hi) = if q <= self.cdf[0] {
            let mut width = SPAN;
            while self.cdf_std(self.z0 - width) > q && width < 1e300 {
                width *= 4.0;
            }
            (self.z0 - width, self.z0)
        } else {
            let mut width = SPAN;
            while self.cdf_std(self.z_end() + width) < q && width < 1e300 {
                width *= 4.0;
            }
            (self.z_end(), self.z_end() + width)
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf_std(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Cdf at every point of an ascending slice.
    pub fn cdf_sorted(&self, sorted: &[f64]) -> Vec<f64> {
        sorted.iter().map(|&x| self.cdf(x)).collect()
    }
}
