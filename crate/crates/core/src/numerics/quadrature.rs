//! Adaptive Gauss–Kronrod (21-point) quadrature with global error control.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::NumericsError;

/// Tolerances and work limits for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(NumericsError::Domain(
                "quadrature tolerances must be strictly positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(NumericsError::Domain("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

/// Integral estimate together with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

// QUADPACK qk21 abscissae (Kronrod, descending) and weights.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_316_648_189,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// 10-point Gauss weights, paired with XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod rule on `[a, b]`, with the embedded Gauss rule as the
/// error estimate.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut finite = fc.is_finite();
    for j in 0..10 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        finite &= s.is_finite();
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    if !finite {
        return Err(NumericsError::NonFinite { at: center });
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    if !(a < b) {
        return Err(NumericsError::Domain(format!(
            "integration bounds must satisfy a < b (got a={a}, b={b})"
        )));
    }
    integrate_with_breaks(f, &[a, b], spec).map(|r| r.value)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, seeding the adaptive
/// bisection with the given partition. Oscillatory integrands converge far
/// more reliably when the seed partition resolves every oscillation.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral, NumericsError> {
    spec.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(NumericsError::Domain(
            "breakpoints must be strictly increasing with at least two entries".into(),
        ));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let seg = gk21(&f, w[0], w[1])?;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }
    let mut subdivisions = heap.len();
    loop {
        if total_err <= spec.target(total) {
            return Ok(Integral {
                value: total,
                abs_error: total_err,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions.max(breaks.len() - 1) {
            return Err(NumericsError::NonConvergence {
                estimate: total,
                abs_error: total_err,
            });
        }
        let Some(worst) = heap.pop() else {
            unreachable!("heap holds at least one segment");
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Segment is at floating-point resolution; nothing left to refine.
            return Err(NumericsError::NonConvergence {
                estimate: total,
                abs_error: total_err,
            });
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Guard against drift in the running sums.
        if subdivisions % 512 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}
