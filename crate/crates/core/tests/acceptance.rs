//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p heavytail --test acceptance -- ac4 ac6` runs a subset.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use heavytail::gof::{bootstrap_gof, ks_bootstrap, BootstrapConfig, GaussianModel, InnerFit, ModelAdapter, NigModel, StableModel};
use heavytail::nig::{nig_pdf, NigParams};
use heavytail::numerics::{draw_normal, integrate_with_breaks, QuadratureSpec, RngStream};
use heavytail::stable::{stable_cdf, stable_fit_mle, stable_pdf, stable_sample, StableGrid, StableParams};
use heavytail::tail::sample_size_study;

const SEED: u64 = 2502;

/// Daily log-return laws fitted to the index in the reference study.
fn table2_stable() -> StableParams {
    StableParams::new(1.64, 0.219, 0.00815, -0.000186).unwrap()
}
fn table2_nig() -> NigParams {
    NigParams::new(55.43, -0.299, 0.01254, -0.000541).unwrap()
}
const TABLE2_GAUSS: (f64, f64) = (-6.09e-4, 0.0151);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn ks_sorted(u: &[f64]) -> f64 {
    heavytail::gof::ks_from_cdf_values(u)
}

fn ac1() -> Verdict {
    const TOL: f64 = 1e-7;
    let mut worst: f64 = 0.0;
    for &(g, m) in &[(1.0, 0.0), (2.5, -1.0), (0.01, 0.003)] {
        let gauss = StableParams::new(2.0, 0.0, g, m).unwrap();
        let cauchy = StableParams::new(1.0, 0.0, g, m).unwrap();
        for i in 0..=400 {
            let x = m + g * (-10.0 + 20.0 * i as f64 / 400.0);
            let z = (x - m) / g;
            // alpha = 2 is N(mu, 2 gamma^2).
            let fg = (-z * z / 4.0).exp() / (2.0 * g * std::f64::consts::PI.sqrt());
            let fc = 1.0 / (std::f64::consts::PI * g * (1.0 + z * z));
            // Compare on the unit-scale axis so the bound is scale free.
            worst = worst.max(g * (stable_pdf(x, &gauss).unwrap() - fg).abs());
            worst = worst.max(g * (stable_pdf(x, &cauchy).unwrap() - fc).abs());
        }
    }
    verdict(worst < TOL, format!("max |error| {worst:.2e} (tol {TOL:.0e}) over [mu-10g, mu+10g]"))
}

fn ac2() -> Verdict {
    const TOL: f64 = 1e-4;
    let spec = QuadratureSpec::new(1e-10, 1e-9, 5000).unwrap();
    let mut worst: f64 = 0.0;
    let mut where_ = String::new();
    for &a in &[0.6, 1.0, 1.5, 1.64, 2.0] {
        for &b in &[0.0, 0.5] {
            let p = StableParams::new(a, b, 1.0, 0.0).unwrap();
            let breaks = [-60.0, -20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0, 60.0];
            let body = integrate_with_breaks(|x| stable_pdf(x, &p).unwrap(), &breaks, &spec).unwrap().value;
            let tails = stable_cdf(-60.0, &p).unwrap() + (1.0 - stable_cdf(60.0, &p).unwrap());
            let e = (body + tails - 1.0).abs();
            if e > worst {
                worst = e;
                where_ = format!("stable({a}, {b})");
            }
        }
    }
    for &a in &[1.0, 5.0, 55.43] {
        for &r in &[0.0, 0.3, -0.3] {
            for &d in &[0.01, 1.0] {
                let p = NigParams::new(a, r * a, d, 0.0).unwrap();
                let w = 40.0 * p.std_dev().max(1.0 / (a - (r * a).abs()));
                let m = p.mean();
                let s = p.std_dev();
                let mut breaks = vec![m - w, m - s, m, m + s, m + w];
                breaks.dedup();
                let mass = integrate_with_breaks(|x| nig_pdf(x, &p).unwrap(), &breaks, &spec).unwrap().value;
                let e = (mass - 1.0).abs();
                if e > worst {
                    worst = e;
                    where_ = format!("nig({a}, {}, {d})", r * a);
                }
            }
        }
    }
    verdict(worst < TOL, format!("max |mass - 1| {worst:.2e} at {where_} (tol {TOL:.0e})"))
}

fn ac3() -> Verdict {
    const TOL: f64 = 0.05;
    let mut ok = true;
    let mut parts = Vec::new();
    for &a in &[1.2, 1.64] {
        let p = StableParams::new(a, 0.0, 1.0, 0.0).unwrap();
        let pts: Vec<(f64, f64)> = (0..=40)
            .map(|i| {
                let x = 20.0 * 5f64.powf(i as f64 / 40.0);
                (x.ln(), stable_pdf(x, &p).unwrap().ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        ok &= (slope + 1.0 + a).abs() <= TOL;
        parts.push(format!("alpha {a}: slope {slope:.4} vs {:.2}", -1.0 - a));
    }
    verdict(ok, format!("{} (tol {TOL})", parts.join(", ")))
}

fn ac4() -> Verdict {
    let p = StableParams::new(1.7, 0.0, 1.0, 0.0).unwrap();
    let grid = StableGrid::new(&p).unwrap();
    // The grid is the production cdf; tie it to the pointwise cdf first.
    let mut gap: f64 = 0.0;
    for i in -20..=20 {
        let x = i as f64 * 0.75;
        gap = gap.max((grid.cdf(x) - stable_cdf(x, &p).unwrap()).abs());
    }
    let n = 100_000;
    // Asymptotic Kolmogorov 1% point.
    let crit = 1.6276 / (n as f64).sqrt();
    let mut passed = 0;
    for s in 0..100 {
        let mut x = stable_sample(n, &p, &RngStream::new(SEED, 4).derive(s));
        x.sort_by(f64::total_cmp);
        if ks_sorted(&grid.cdf_sorted(&x)) <= crit {
            passed += 1;
        }
    }
    verdict(
        passed >= 95 && gap < 1e-6,
        format!("{passed}/100 seeds pass KS at 1% (need 95); grid vs pointwise cdf {gap:.1e}"),
    )
}

fn ac5() -> Verdict {
    let truth = table2_stable();
    let mut within = 0;
    let mut failed = 0;
    for s in 0..100 {
        let x = stable_sample(2502, &truth, &RngStream::new(SEED, 5).derive(s));
        match stable_fit_mle(&x) {
            Ok(f) if (f.params.alpha - truth.alpha).abs() <= 0.12 => within += 1,
            Ok(_) => {}
            Err(_) => failed += 1,
        }
    }
    verdict(
        within >= 90,
        format!("{within}/100 seeds with |alpha_hat - 1.64| <= 0.12 (need 90), {failed} fit errors"),
    )
}

fn ac6() -> Verdict {
    const PAPER: f64 = 0.0184;
    const PAPER_TOL: f64 = 0.0015;
    const ORACLE_TOL: f64 = 0.001;
    let oracle = 0.886 / 2502f64.sqrt();
    let (m, s) = TABLE2_GAUSS;
    let x: Vec<f64> = draw_normal(&RngStream::new(SEED, 6), 2502).iter().map(|z| m + s * z).collect();
    let mut limits = Vec::new();
    for seed in 1..=5 {
        let cfg = BootstrapConfig {
            master_seed: seed,
            ..Default::default()
        };
        limits.push(ks_bootstrap(&x, &GaussianModel, &cfg).unwrap().ks_limit);
    }
    let ok = limits
        .iter()
        .all(|l| (l - PAPER).abs() <= PAPER_TOL && (l - oracle).abs() <= ORACLE_TOL);
    let shown: Vec<String> = limits.iter().map(|l| format!("{l:.5}")).collect();
    verdict(
        ok,
        format!("limits [{}] vs {PAPER} +/- {PAPER_TOL} and {oracle:.5} +/- {ORACLE_TOL}", shown.join(", ")),
    )
}

fn ac7() -> Verdict {
    const PAPER: f64 = 0.0209;
    const TOL: f64 = 0.003;
    let x = stable_sample(2502, &table2_stable(), &RngStream::new(SEED, 7));
    let cfg = BootstrapConfig {
        inner_fit: InnerFit::FastQuantile,
        master_seed: SEED,
        ..Default::default()
    };
    let ks = ks_bootstrap(&x, &StableModel, &cfg).unwrap();
    verdict(
        (ks.ks_limit - PAPER).abs() <= TOL,
        format!("limit {:.5} vs {PAPER} +/- {TOL} (D {:.5}, p {:.3})", ks.ks_limit, ks.ks_stat, ks.p_value),
    )
}

fn ac8() -> Verdict {
    let p = StableParams::new(1.7, 0.0, 1.0, 0.0).unwrap();
    let sizes = [1000, 2502, 10_000, 100_000, 1_000_000];
    let r = sample_size_study(&p, &sizes, 20, SEED).unwrap();
    let mean = |n: usize| r.rows.iter().find(|row| row.sample_size == n).and_then(|row| row.alpha_hat_mean).unwrap_or(f64::NAN);
    let checks = [
        (1000, mean(1000) > 2.0, "> 2.0"),
        (2502, (1.9..=2.4).contains(&mean(2502)), "in [1.9, 2.4]"),
        (100_000, (1.6..=1.95).contains(&mean(100_000)), "in [1.6, 1.95]"),
        (1_000_000, (1.5..=1.85).contains(&mean(1_000_000)), "in [1.5, 1.85]"),
    ];
    let detail: Vec<String> = checks
        .iter()
        .map(|(n, ok, want)| format!("{n}: {:.3} {want} {}", mean(*n), if *ok { "ok" } else { "MISS" }))
        .collect();
    verdict(checks.iter().all(|c| c.1), detail.join("; "))
}

fn ac9() -> Verdict {
    const S: f64 = 0.05;
    const TOL: f64 = 0.02;
    const OUTER: u64 = 200;
    // With (R + 1) s an integer, rejecting when D exceeds the order statistic
    // at ceil((1 - s) R) has exact size s under the null.
    const R: usize = 119;
    let (m, s) = TABLE2_GAUSS;
    let stable = table2_stable();
    let nig = table2_nig();
    let models: [(&dyn ModelAdapter, Box<dyn Fn(&RngStream) -> Vec<f64>>); 3] = [
        (&GaussianModel, Box::new(move |st| draw_normal(st, 500).iter().map(|z| m + s * z).collect())),
        (&StableModel, Box::new(move |st| stable_sample(500, &stable, st))),
        (&NigModel, Box::new(move |st| heavytail::nig::nig_sample(500, &nig, st))),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, (model, draw)) in models.iter().enumerate() {
        let mut rejects = 0;
        let mut errors = 0;
        for o in 0..OUTER {
            let data = draw(&RngStream::new(SEED, 90 + k as u64).derive(o));
            let cfg = BootstrapConfig {
                replications: R,
                significance: S,
                inner_fit: InnerFit::FastQuantile,
                master_seed: 10_000 + o,
                chi2_bins: None,
            };
            match bootstrap_gof(&data, *model, &cfg) {
                Ok(r) if r.rejected => rejects += 1,
                Ok(_) => {}
                Err(_) => errors += 1,
            }
        }
        let rate = rejects as f64 / OUTER as f64;
        ok &= (rate - S).abs() <= TOL && errors == 0;
        parts.push(format!("{} {:.3}{}", model.name(), rate, if errors > 0 { format!(" ({errors} errors)") } else { String::new() }));
    }
    verdict(ok, format!("rejection rates {} (target {S} +/- {TOL}, n=500, {OUTER} seeds)", parts.join(", ")))
}

fn heavytail_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heavytail"))
}

fn run_ok(cmd: &mut Command) -> Result<(), String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))
    }
}

fn ac10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = d.join("closes.csv");
    let steps = (|| -> Result<(), String> {
        run_ok(heavytail_cmd().args(["simulate", "--n", "2500", "--output"]).arg(&csv))?;
        run_ok(heavytail_cmd().args(["fit", "--input"]).arg(&csv).arg("--out").arg(d))?;
        run_ok(
            heavytail_cmd()
                .args(["gof", "--replications", "100", "--inner-fit", "quantile", "--input"])
                .arg(&csv)
                .arg("--out")
                .arg(d),
        )?;
        run_ok(heavytail_cmd().args(["hist", "--input"]).arg(&csv).arg("--out").arg(d))?;
        let fits: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("fits.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for key in ["mean", "std_dev", "skewness", "kurtosis"] {
            fits["summary"].get(key).ok_or(format!("fits.json lacks summary.{key}"))?;
        }
        if fits["models"].as_array().map_or(0, |m| m.len()) != 3 {
            return Err("fits.json should hold three models".into());
        }
        let gof: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("gof.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for row in gof.as_array().ok_or("gof.json is not a list")? {
            for key in ["model", "ks_stat", "ks_limit", "p_value", "chi2_stat", "chi2_dof", "chi2_pvalue", "rejected"] {
                row.get(key).ok_or(format!("gof row lacks {key}"))?;
            }
        }
        Ok(())
    })();
    let pipeline = match &steps {
        Ok(()) => "fit/gof/hist outputs complete on a 2501-close series".to_string(),
        Err(e) => format!("pipeline error: {e}"),
    };
    // Index data are not distributed; the calibration check runs only when supplied.
    let ipc = match std::env::var("HEAVYTAIL_IPC_CSV") {
        Ok(path) => {
            let out = d.join("ipc");
            match run_ok(heavytail_cmd().args(["fit", "--models", "stable", "--input", &path, "--out"]).arg(&out)) {
                Ok(()) => {
                    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("fits.json")).unwrap()).unwrap();
                    let a = v["models"][0]["params"]["alpha"].as_f64().unwrap_or(f64::NAN);
                    Some(((a - 1.64).abs() <= 0.05, format!("index alpha {a:.3} vs 1.64 +/- 0.05")))
                }
                Err(e) => Some((false, format!("index fit failed: {e}"))),
            }
        }
        Err(_) => None,
    };
    match ipc {
        Some((ok, msg)) => verdict(steps.is_ok() && ok, format!("{pipeline}; {msg}")),
        None => verdict(steps.is_ok(), format!("{pipeline}; index check skipped (set HEAVYTAIL_IPC_CSV)")),
    }
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_default()
}

fn ac11() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = d.join("closes.csv");
    let res = (|| -> Result<(), String> {
        run_ok(heavytail_cmd().args(["simulate", "--n", "600", "--seed", "11", "--output"]).arg(&csv))?;
        let mut outputs = Vec::new();
        for (i, jobs) in ["1", "2", "1"].iter().enumerate() {
            let out = d.join(format!("run{i}"));
            run_ok(
                heavytail_cmd()
                    .args(["gof", "--replications", "100", "--inner-fit", "quantile", "--seed", "7", "--jobs", jobs, "--input"])
                    .arg(&csv)
                    .arg("--out")
                    .arg(&out),
            )?;
            run_ok(
                heavytail_cmd()
                    .args(["tailstudy", "--sizes", "1000,5000", "--seeds", "4", "--seed", "7", "--jobs", jobs, "--out"])
                    .arg(&out),
            )?;
            outputs.push((read(&out.join("gof.json")), read(&out.join("tailstudy.csv"))));
        }
        if outputs[0].0.is_empty() || outputs[0].1.is_empty() {
            return Err("missing output files".into());
        }
        if outputs.iter().any(|o| *o != outputs[0]) {
            return Err("outputs differ between runs".into());
        }
        Ok(())
    })();
    match res {
        Ok(()) => verdict(true, "gof.json and tailstudy.csv byte-identical over 3 runs (jobs 1, 2, 1)"),
        Err(e) => verdict(false, e),
    }
}

type Criterion = (&'static str, &'static str, Duration, fn() -> Verdict);

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 11] = [
        ("AC1", "stable closed forms", Duration::from_secs(1), ac1),
        ("AC2", "density normalization", Duration::from_secs(30), ac2),
        ("AC3", "density tail exponent", Duration::from_secs(10), ac3),
        ("AC4", "sampler fidelity", min(5), ac4),
        ("AC5", "stable MLE recovery", min(30), ac5),
        ("AC6", "Gaussian bootstrap limit", min(2), ac6),
        ("AC7", "stable bootstrap limit", min(15), ac7),
        ("AC8", "tail index versus sample size", min(60), ac8),
        ("AC9", "null calibration", min(30), ac9),
        ("AC10", "pipeline on a daily close series", min(10), ac10),
        ("AC11", "determinism", min(10), ac11),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.to_ascii_uppercase())
        .collect();
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| f == id) {
            continue;
        }
        let t = Instant::now();
        let v = run();
        let took = t.elapsed();
        let in_time = took <= budget;
        let pass = v.pass && in_time;
        if !pass {
            failures += 1;
        }
        let time_note = if in_time { String::new() } else { format!(" [over budget {budget:?}]") };
        println!(
            "{id:<4} {} {name}: {} ({:.1}s){time_note}",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
