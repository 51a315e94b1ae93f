//! C interface to the `heavytail` library.
//!
//! Every function returns an [`HtStatus`]; results travel through out
//! pointers. On failure a description is kept per thread and can be copied
//! out with [`ht_last_error_message`]. Objects that own memory are opaque
//! handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use heavytail::gof::{bootstrap_gof, BootstrapConfig, GofError, GofReport, InnerFit, ModelKind};
use heavytail::nig::{nig_cdf, nig_fit_mle, nig_pdf, nig_sample, NigError, NigParams};
use heavytail::numerics::RngStream;
use heavytail::stable::{
    stable_cdf, stable_fit_mle, stable_fit_quantile, stable_pdf, stable_sample, StableError, StableGrid, StableParams,
};
use heavytail::tail::{powerlaw_fit_ks, TailError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooFewObservations = 3,
    ComputationFailed = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtStableParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtNigParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtTailFit {
    pub alpha_tail: f64,
    pub xmin: f64,
    pub n_tail: usize,
    pub ks_at_xmin: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtModel {
    Gaussian = 0,
    Stable = 1,
    Nig = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtFitMethod {
    Mle = 0,
    Quantile = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtGofConfig {
    /// At least 100.
    pub replications: usize,
    /// In (0, 0.5).
    pub significance: f64,
    pub inner_fit: HtFitMethod,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtGofSummary {
    pub ks_stat: f64,
    pub ks_limit: f64,
    pub p_value: f64,
    pub chi2_stat: f64,
    pub chi2_dof: u32,
    pub chi2_pvalue: f64,
    /// NaN unless the model is Gaussian.
    pub ad_stat: f64,
    pub rejected: bool,
}

/// Stable law with a precomputed density and distribution grid.
pub struct HtStableLaw(StableGrid);

/// Goodness-of-fit report for one model.
pub struct HtGofReport(GofReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(HtStatus, String);

impl From<StableError> for Fail {
    fn from(e: StableError) -> Self {
        let s = match e {
            StableError::InvalidParams(_) | StableError::EmptyData | StableError::DegenerateData(_) => HtStatus::InvalidArgument,
            StableError::TooFewObservations { .. } => HtStatus::TooFewObservations,
            StableError::Numerics(_) => HtStatus::ComputationFailed,
        };
        Fail(s, e.to_string())
    }
}

impl From<NigError> for Fail {
    fn from(e: NigError) -> Self {
        let s = match e {
            NigError::TooFewObservations { .. } => HtStatus::TooFewObservations,
            NigError::Numerics(_) => HtStatus::ComputationFailed,
            _ => HtStatus::InvalidArgument,
        };
        Fail(s, e.to_string())
    }
}

impl From<TailError> for Fail {
    fn from(e: TailError) -> Self {
        let s = match e {
            TailError::TooFewObservations { .. } => HtStatus::TooFewObservations,
            TailError::NoValidThreshold => HtStatus::ComputationFailed,
            _ => HtStatus::InvalidArgument,
        };
        Fail(s, e.to_string())
    }
}

impl From<GofError> for Fail {
    fn from(e: GofError) -> Self {
        let s = match &e {
            GofError::Stable(StableError::TooFewObservations { .. }) | GofError::Nig(NigError::TooFewObservations { .. }) => {
                HtStatus::TooFewObservations
            }
            GofError::Config(_) | GofError::Precondition(_) | GofError::Unsorted { .. } => HtStatus::InvalidArgument,
            _ => HtStatus::ComputationFailed,
        };
        Fail(s, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HtStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HtStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            HtStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn slice<'a>(data: *const f64, n: usize) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null("data"));
    }
    Ok(std::slice::from_raw_parts(data, n))
}

unsafe fn slice_mut<'a>(data: *mut f64, n: usize) -> Result<&'a mut [f64], Fail> {
    if n == 0 {
        return Ok(&mut []);
    }
    if data.is_null() {
        return Err(null("out"));
    }
    Ok(std::slice::from_raw_parts_mut(data, n))
}

fn stable(p: HtStableParams) -> Result<StableParams, Fail> {
    Ok(StableParams::new(p.alpha, p.beta, p.gamma, p.mu)?)
}

fn nig(p: HtNigParams) -> Result<NigParams, Fail> {
    Ok(NigParams::new(p.alpha, p.beta, p.delta, p.mu)?)
}

/// Copies the calling thread's last error message, NUL terminated, into
/// `buf` (truncating to `len`). Returns the full message length without the
/// terminator, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ht_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ht_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Stable density by direct inversion of the characteristic function.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_pdf(params: HtStableParams, x: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, stable_pdf(x, &stable(params)?)?, "out"))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_cdf(params: HtStableParams, x: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, stable_cdf(x, &stable(params)?)?, "out"))
}

/// Writes `n` draws from stream `(seed, stream)` into `out`.
///
/// # Safety
/// `out` must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_sample(params: HtStableParams, seed: u64, stream: u64, n: usize, out: *mut f64) -> HtStatus {
    guard(|| {
        let p = stable(params)?;
        let dst = slice_mut(out, n)?;
        dst.copy_from_slice(&stable_sample(n, &p, &RngStream::new(seed, stream)));
        Ok(())
    })
}

/// Fits a stable law. `log_likelihood` may be null.
///
/// # Safety
/// `data` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_fit(
    data: *const f64,
    n: usize,
    method: HtFitMethod,
    out: *mut HtStableParams,
    log_likelihood: *mut f64,
) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let x = slice(data, n)?;
        let f = match method {
            HtFitMethod::Mle => stable_fit_mle(x)?,
            HtFitMethod::Quantile => stable_fit_quantile(x)?,
        };
        let p = f.params;
        out.write(HtStableParams {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            mu: p.mu,
        });
        if !log_likelihood.is_null() {
            log_likelihood.write(f.log_likelihood);
        }
        Ok(())
    })
}

/// Builds a reusable stable law; release it with [`ht_stable_law_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_law_new(params: HtStableParams, out: *mut *mut HtStableLaw) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = StableGrid::new(&stable(params)?)?;
        out.write(Box::into_raw(Box::new(HtStableLaw(grid))));
        Ok(())
    })
}

/// # Safety
/// `law` must come from [`ht_stable_law_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_law_free(law: *mut HtStableLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

unsafe fn law_ref<'a>(law: *const HtStableLaw) -> Result<&'a StableGrid, Fail> {
    law.as_ref().map(|l| &l.0).ok_or_else(|| null("law"))
}

/// # Safety
/// `law` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_law_pdf(law: *const HtStableLaw, x: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, law_ref(law)?.pdf(x), "out"))
}

/// # Safety
/// `law` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_law_cdf(law: *const HtStableLaw, x: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, law_ref(law)?.cdf(x), "out"))
}

/// # Safety
/// `law` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ht_stable_law_quantile(law: *const HtStableLaw, q: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, law_ref(law)?.quantile(q)?, "out"))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_nig_pdf(params: HtNigParams, x: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, nig_pdf(x, &nig(params)?)?, "out"))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_nig_cdf(params: HtNigParams, x: f64, out: *mut f64) -> HtStatus {
    guard(|| write(out, nig_cdf(x, &nig(params)?)?, "out"))
}

/// # Safety
/// `out` must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ht_nig_sample(params: HtNigParams, seed: u64, stream: u64, n: usize, out: *mut f64) -> HtStatus {
    guard(|| {
        let p = nig(params)?;
        let dst = slice_mut(out, n)?;
        dst.copy_from_slice(&nig_sample(n, &p, &RngStream::new(seed, stream)));
        Ok(())
    })
}

/// Maximum-likelihood NIG fit. `log_likelihood` may be null.
///
/// # Safety
/// `data` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_nig_fit(data: *const f64, n: usize, out: *mut HtNigParams, log_likelihood: *mut f64) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = nig_fit_mle(slice(data, n)?)?;
        let p = f.params;
        out.write(HtNigParams {
            alpha: p.alpha,
            beta: p.beta,
            delta: p.delta,
            mu: p.mu,
        });
        if !log_likelihood.is_null() {
            log_likelihood.write(f.log_likelihood);
        }
        Ok(())
    })
}

/// Power-law tail fit over magnitudes of both signs.
///
/// # Safety
/// `data` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_tail_fit(data: *const f64, n: usize, out: *mut HtTailFit) -> HtStatus {
    guard(|| {
        let f = powerlaw_fit_ks(slice(data, n)?)?;
        write(
            out,
            HtTailFit {
                alpha_tail: f.alpha_tail,
                xmin: f.xmin,
                n_tail: f.n_tail,
                ks_at_xmin: f.ks_at_xmin,
            },
            "out",
        )
    })
}

/// Bootstrap goodness-of-fit of one model; release the report with
/// [`ht_gof_report_free`].
///
/// # Safety
/// `data` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_gof_run(
    data: *const f64,
    n: usize,
    model: HtModel,
    config: HtGofConfig,
    out: *mut *mut HtGofReport,
) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match model {
            HtModel::Gaussian => ModelKind::Gaussian,
            HtModel::Stable => ModelKind::Stable,
            HtModel::Nig => ModelKind::Nig,
        };
        let cfg = BootstrapConfig {
            replications: config.replications,
            significance: config.significance,
            inner_fit: match config.inner_fit {
                HtFitMethod::Mle => InnerFit::FullMle,
                HtFitMethod::Quantile => InnerFit::FastQuantile,
            },
            master_seed: config.seed,
            chi2_bins: None,
        };
        let report = bootstrap_gof(slice(data, n)?, kind.adapter(), &cfg)?;
        out.write(Box::into_raw(Box::new(HtGofReport(report))));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ht_gof_report_summary(report: *const HtGofReport, out: *mut HtGofSummary) -> HtStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        write(
            out,
            HtGofSummary {
                ks_stat: r.ks_stat,
                ks_limit: r.ks_limit,
                p_value: r.p_value,
                chi2_stat: r.chi2_stat,
                chi2_dof: r.chi2_dof,
                chi2_pvalue: r.chi2_pvalue,
                ad_stat: r.ad_stat.unwrap_or(f64::NAN),
                rejected: r.rejected,
            },
            "out",
        )
    })
}

/// Copies the report as NUL-terminated JSON into `buf`. `needed` (may be
/// null) receives the required size including the terminator; with a short
/// or null buffer the call returns `BufferTooSmall` and writes nothing.
///
/// # Safety
/// `report` must be a live handle; `buf` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ht_gof_report_json(report: *const HtGofReport, buf: *mut c_char, len: usize, needed: *mut usize) -> HtStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        let json = serde_json::to_string(r).map_err(|e| Fail(HtStatus::ComputationFailed, e.to_string()))?;
        let size = json.len() + 1;
        if !needed.is_null() {
            needed.write(size);
        }
        if buf.is_null() || len < size {
            return Err(Fail(HtStatus::BufferTooSmall, format!("buffer needs {size} bytes")));
        }
        ptr::copy_nonoverlapping(json.as_ptr().cast::<c_char>(), buf, json.len());
        *buf.add(json.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`ht_gof_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ht_gof_report_free(report: *mut HtGofReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
