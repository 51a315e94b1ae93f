use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use heavytail_ffi::*;

const CAUCHY: HtStableParams = HtStableParams {
    alpha: 1.0,
    beta: 0.0,
    gamma: 1.0,
    mu: 0.0,
};

fn last_error() -> String {
    let mut buf = [0 as c_char; 512];
    unsafe {
        ht_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn stable_point_functions() {
    let mut f = 0.0;
    assert_eq!(unsafe { ht_stable_pdf(CAUCHY, 1.0, &mut f) }, HtStatus::Ok);
    assert!((f - 0.5 / std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(unsafe { ht_stable_cdf(CAUCHY, 0.0, &mut f) }, HtStatus::Ok);
    assert!((f - 0.5).abs() < 1e-12);
    assert_eq!(unsafe { ht_stable_pdf(CAUCHY, 1.0, ptr::null_mut()) }, HtStatus::NullPointer);
    let bad = HtStableParams { beta: 1.5, ..CAUCHY };
    assert_eq!(unsafe { ht_stable_pdf(bad, 0.0, &mut f) }, HtStatus::InvalidArgument);
    assert!(last_error().contains("beta"), "{}", last_error());
}

#[test]
fn law_handle_round_trip() {
    let p = HtStableParams {
        alpha: 1.64,
        beta: 0.219,
        gamma: 0.00815,
        mu: -0.000186,
    };
    let mut law = ptr::null_mut();
    assert_eq!(unsafe { ht_stable_law_new(p, &mut law) }, HtStatus::Ok);
    let (mut q, mut c) = (0.0, 0.0);
    unsafe {
        assert_eq!(ht_stable_law_quantile(law, 0.3, &mut q), HtStatus::Ok);
        assert_eq!(ht_stable_law_cdf(law, q, &mut c), HtStatus::Ok);
        assert_eq!(ht_stable_law_quantile(law, 1.5, &mut q), HtStatus::InvalidArgument);
        ht_stable_law_free(law);
        ht_stable_law_free(ptr::null_mut());
        assert_eq!(ht_stable_law_cdf(ptr::null(), 0.0, &mut c), HtStatus::NullPointer);
    }
    assert!((c - 0.3).abs() < 1e-8);
}

#[test]
fn sample_and_fit() {
    let n = 3000;
    let p = HtStableParams {
        alpha: 1.5,
        beta: 0.0,
        gamma: 2.0,
        mu: 1.0,
    };
    let mut x = vec![0.0; n];
    let mut again = vec![0.0; n];
    unsafe {
        assert_eq!(ht_stable_sample(p, 9, 0, n, x.as_mut_ptr()), HtStatus::Ok);
        assert_eq!(ht_stable_sample(p, 9, 0, n, again.as_mut_ptr()), HtStatus::Ok);
    }
    assert_eq!(x, again);
    let mut fit = HtStableParams { alpha: 0.0, beta: 0.0, gamma: 0.0, mu: 0.0 };
    let mut ll = 0.0;
    assert_eq!(unsafe { ht_stable_fit(x.as_ptr(), n, HtFitMethod::Quantile, &mut fit, &mut ll) }, HtStatus::Ok);
    assert!((fit.alpha - 1.5).abs() < 0.15 && (fit.gamma - 2.0).abs() < 0.3, "{fit:?}");
    assert!(ll.is_finite());
    assert_eq!(
        unsafe { ht_stable_fit(x.as_ptr(), 20, HtFitMethod::Mle, &mut fit, ptr::null_mut()) },
        HtStatus::TooFewObservations
    );
    let mut t = HtTailFit { alpha_tail: 0.0, xmin: 0.0, n_tail: 0, ks_at_xmin: 0.0 };
    assert_eq!(unsafe { ht_tail_fit(x.as_ptr(), n, &mut t) }, HtStatus::Ok);
    assert!(t.alpha_tail > 1.0 && t.n_tail >= 10);
}

#[test]
fn nig_functions() {
    let p = HtNigParams {
        alpha: 1.0,
        beta: 0.0,
        delta: 1.0,
        mu: 0.0,
    };
    let mut f = 0.0;
    assert_eq!(unsafe { ht_nig_pdf(p, 0.0, &mut f) }, HtStatus::Ok);
    assert!((f - 0.520_803_8).abs() < 1e-7);
    assert_eq!(unsafe { ht_nig_cdf(p, 0.0, &mut f) }, HtStatus::Ok);
    assert!((f - 0.5).abs() < 1e-10);
    let mut x = vec![0.0; 2000];
    assert_eq!(unsafe { ht_nig_sample(p, 1, 1, x.len(), x.as_mut_ptr()) }, HtStatus::Ok);
    let mut fit = p;
    assert_eq!(unsafe { ht_nig_fit(x.as_ptr(), x.len(), &mut fit, ptr::null_mut()) }, HtStatus::Ok);
    assert!((fit.delta - 1.0).abs() < 0.4, "{fit:?}");
    let bad = HtNigParams { beta: 2.0, ..p };
    assert_eq!(unsafe { ht_nig_pdf(bad, 0.0, &mut f) }, HtStatus::InvalidArgument);
}

#[test]
fn gof_report_handle() {
    let mut x = vec![0.0; 400];
    unsafe { ht_stable_sample(CAUCHY, 4, 0, x.len(), x.as_mut_ptr()) };
    let cfg = HtGofConfig {
        replications: 100,
        significance: 0.05,
        inner_fit: HtFitMethod::Quantile,
        seed: 5,
    };
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { ht_gof_run(x.as_ptr(), x.len(), HtModel::Gaussian, cfg, &mut rep) }, HtStatus::Ok);
    let mut s = std::mem::MaybeUninit::<HtGofSummary>::uninit();
    assert_eq!(unsafe { ht_gof_report_summary(rep, s.as_mut_ptr()) }, HtStatus::Ok);
    let s = unsafe { s.assume_init() };
    assert!(s.rejected && s.ks_stat > s.ks_limit && !s.ad_stat.is_nan());
    let mut need = 0;
    assert_eq!(unsafe { ht_gof_report_json(rep, ptr::null_mut(), 0, &mut need) }, HtStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; need];
    assert_eq!(unsafe { ht_gof_report_json(rep, buf.as_mut_ptr(), need, &mut need) }, HtStatus::Ok);
    let json = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["model"], "gaussian");
    unsafe { ht_gof_report_free(rep) };

    let few = HtGofConfig { replications: 10, ..cfg };
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { ht_gof_run(x.as_ptr(), x.len(), HtModel::Nig, few, &mut rep) }, HtStatus::InvalidArgument);
    assert!(rep.is_null());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ht_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    // the test harness only builds the rlib; build the archive with the same profile
    let lib = target_dir().join("libheavytail_ffi.a");
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let built = Command::new(cargo)
        .args(["build", "--profile", "test", "-p", "heavytail-ffi", "--lib"])
        .current_dir(&manifest)
        .status()
        .unwrap();
    assert!(built.success(), "building the static library failed");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = tempfile_path("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-D_DEFAULT_SOURCE")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["model"], "gaussian");
    let _ = std::fs::remove_file(out);
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}-{}", std::process::id()))
}
