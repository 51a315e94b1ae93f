use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use heavytail::gof::{run_gof, BootstrapConfig, InnerFit, ModelGof, ModelKind};
use heavytail::nig::{nig_sample, NigParams};
use heavytail::numerics::{draw_normal, RngStream};
use heavytail::report::{fit_report, histogram_overlay, FitReport};
use heavytail::returns::{load_prices_csv, log_returns, prices_from_returns, write_prices_csv, ReturnsError};
use heavytail::stable::{stable_sample, StableParams};
use heavytail::tail::sample_size_study;

const DEFAULT_SEED: u64 = 2502;

#[derive(Parser)]
#[command(name = "heavytail", version, about = "Heavy-tailed fits and goodness-of-fit for daily log-returns")]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, env = "HEAVYTAIL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summary statistics and maximum-likelihood fits, written to fits.json.
    Fit(InputArgs),
    /// Bootstrap KS, chi-square and Anderson–Darling tests, written to gof.json.
    Gof {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1000)]
        replications: usize,
        #[arg(long, default_value_t = 0.05)]
        significance: f64,
        #[arg(long, value_enum, default_value_t = InnerFitArg::Mle)]
        inner_fit: InnerFitArg,
        /// Override the chi-square bin count.
        #[arg(long)]
        chi2_bins: Option<usize>,
    },
    /// Tail index of stable samples as a function of sample size, written to tailstudy.csv.
    Tailstudy {
        #[arg(long, default_value_t = 1.7, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1000, 2502, 10_000, 100_000, 1_000_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Histogram with fitted density columns, written to overlay.csv.
    Hist {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
    /// Simulated daily closes from a fitted family, written as date,close CSV.
    Simulate {
        #[arg(long, value_enum, default_value_t = SimModel::Stable)]
        model: SimModel,
        /// Family parameters: stable alpha,beta,gamma,mu; nig alpha,beta,delta,mu; gaussian mu,sigma.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [1.64, 0.219, 0.00815, -0.000186])]
        params: Vec<f64>,
        /// Number of returns; the file holds one more close.
        #[arg(long, default_value_t = 2502)]
        n: usize,
        #[arg(long, default_value_t = 1000.0)]
        start_price: f64,
        #[arg(long, default_value = "2000-01-03")]
        start_date: NaiveDate,
        #[arg(long, default_value = "simulated.csv")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// CSV with `date,close` columns.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelArg::Gaussian, ModelArg::Stable, ModelArg::Nig])]
    models: Vec<ModelArg>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Gaussian,
    Stable,
    Nig,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Gaussian => ModelKind::Gaussian,
            ModelArg::Stable => ModelKind::Stable,
            ModelArg::Nig => ModelKind::Nig,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InnerFitArg {
    Mle,
    Quantile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimModel {
    Gaussian,
    Stable,
    Nig,
}

/// Failures split by exit status.
enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Compute(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

struct Loaded {
    label: String,
    returns: Vec<f64>,
    skipped: usize,
    models: Vec<ModelKind>,
    out: PathBuf,
}

fn load(args: &InputArgs) -> Result<Loaded, Failure> {
    let prices = load_prices_csv(&args.input).map_err(usage)?;
    let label = args.input.display().to_string();
    let returns = log_returns(&prices, &label).values;
    if returns.len() < 2 {
        return Err(usage(ReturnsError::TooFewPrices));
    }
    let mut models: Vec<ModelKind> = args.models.iter().map(|&m| m.into()).collect();
    models.sort();
    models.dedup();
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))
        .map_err(usage)?;
    Ok(Loaded {
        label,
        returns,
        skipped: prices.skipped_missing,
        models,
        out: args.out.clone(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(usage)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(usage)?;
    w.flush().map_err(usage)?;
    Ok(())
}

fn cmd_fit(args: &InputArgs) -> Result<(), Failure> {
    let d = load(args)?;
    let report = fit_report(&d.returns, &d.label, d.skipped, &d.models)?;
    write_json(&d.out.join("fits.json"), &report)?;
    print_fits(&report);
    fail_if_any(report.models.iter().filter_map(|m| match m {
        heavytail::report::ModelFit::Failed { model, error } => Some((model.as_str(), error.as_str())),
        _ => None,
    }))
}

fn print_fits(r: &FitReport) {
    let s = &r.summary;
    println!(
        "n={} mean={:.6e} sd={:.6e} skewness={:.4} kurtosis={:.4}",
        s.n, s.mean, s.std_dev, s.skewness, s.kurtosis
    );
    for m in &r.models {
        match m {
            heavytail::report::ModelFit::Fitted { model, params, log_likelihood, .. } => {
                println!("{model:<9} {} loglik={log_likelihood:.4}", serde_json::to_string(params).unwrap_or_default())
            }
            heavytail::report::ModelFit::Failed { model, error } => println!("{model:<9} failed: {error}"),
        }
    }
}

fn fail_if_any<'a>(failed: impl Iterator<Item = (&'a str, &'a str)>) -> Result<(), Failure> {
    let msgs: Vec<String> = failed.map(|(m, e)| format!("{m}: {e}")).collect();
    if msgs.is_empty() {
        Ok(())
    } else {
        Err(Failure::Compute(anyhow!(msgs.join("; "))))
    }
}

fn cmd_gof(args: &InputArgs, cfg: BootstrapConfig) -> Result<(), Failure> {
    cfg.validate().map_err(usage)?;
    let d = load(args)?;
    let rows = run_gof(&d.returns, &cfg, &d.models);
    write_json(&d.out.join("gof.json"), &rows)?;
    println!("{:<9} {:>9} {:>9} {:>7} {:>10} {:>4} {:>8} {:>9}  reject?", "model", "D", "limit", "p", "chi2", "dof", "chi2 p", "AD");
    for r in &rows {
        match r {
            ModelGof::Report(r) => println!(
                "{:<9} {:>9.5} {:>9.5} {:>7.3} {:>10.3} {:>4} {:>8.4} {:>9}  {}",
                r.model,
                r.ks_stat,
                r.ks_limit,
                r.p_value,
                r.chi2_stat,
                r.chi2_dof,
                r.chi2_pvalue,
                r.ad_stat.map_or("-".to_string(), |a| format!("{a:.4}")),
                if r.rejected { "yes" } else { "no" }
            ),
            ModelGof::Failed { model, error } => println!("{model:<9} failed: {error}"),
        }
    }
    fail_if_any(rows.iter().filter_map(|r| match r {
        ModelGof::Failed { model, error } => Some((model.as_str(), error.as_str())),
        _ => None,
    }))
}

fn cmd_tailstudy(params: StableParams, sizes: &[usize], seeds: usize, master: u64, out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(usage)?;
    let result = sample_size_study(&params, sizes, seeds, master).map_err(usage)?;
    let path = out.join("tailstudy.csv");
    let mut w = create(&path)?;
    result.write_csv(&mut w)?;
    w.flush().map_err(usage)?;
    for row in &result.rows {
        if !row.failures.is_empty() {
            eprintln!("warning: n={}: {} of {} fits failed ({})", row.sample_size, row.failures.len(), seeds, row.failures[0]);
        }
        if row.lacks_stable_tail() {
            eprintln!("warning: n={}: tail index above the stable range, no stable power tail", row.sample_size);
        }
        println!(
            "{:>9}  {}",
            row.sample_size,
            row.alpha_hat_mean.map_or("-".into(), |a| format!("{a:.3}"))
        );
    }
    Ok(())
}

fn cmd_hist(args: &InputArgs, bins: usize) -> Result<(), Failure> {
    let d = load(args)?;
    let report = fit_report(&d.returns, &d.label, d.skipped, &d.models)?;
    let fits: Vec<(&str, &heavytail::gof::ModelParams)> = report.models.iter().filter_map(|m| m.params()).collect();
    if fits.is_empty() {
        return Err(Failure::Compute(anyhow!("no model could be fitted")));
    }
    let overlay = histogram_overlay(&d.returns, bins, &fits).map_err(|e| match e {
        heavytail::gof::GofError::Precondition(_) => usage(e),
        e => Failure::Compute(e.into()),
    })?;
    let mut w = create(&d.out.join("overlay.csv"))?;
    overlay.write_csv(&mut w)?;
    w.flush().map_err(usage)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(model: SimModel, p: &[f64], n: usize, start: f64, date: NaiveDate, output: &Path, seed: u64) -> Result<(), Failure> {
    let stream = RngStream::new(seed, 0);
    let returns = match model {
        SimModel::Stable => {
            let [a, b, g, m] = p else {
                return Err(usage(anyhow!("stable needs 4 parameters: alpha,beta,gamma,mu")));
            };
            stable_sample(n, &StableParams::new(*a, *b, *g, *m).map_err(usage)?, &stream)
        }
        SimModel::Nig => {
            let [a, b, d, m] = p else {
                return Err(usage(anyhow!("nig needs 4 parameters: alpha,beta,delta,mu")));
            };
            nig_sample(n, &NigParams::new(*a, *b, *d, *m).map_err(usage)?, &stream)
        }
        SimModel::Gaussian => {
            let [m, s] = p else {
                return Err(usage(anyhow!("gaussian needs 2 parameters: mu,sigma")));
            };
            if !(*s > 0.0) {
                return Err(usage(anyhow!("sigma must be positive")));
            }
            draw_normal(&stream, n).into_iter().map(|z| m + s * z).collect()
        }
    };
    if !(start > 0.0) {
        return Err(usage(anyhow!("start price must be positive")));
    }
    let prices = prices_from_returns(&returns, start, date)?;
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(usage)?;
    }
    let mut w = create(output)?;
    write_prices_csv(&mut w, &prices).map_err(usage)?;
    w.flush().map_err(usage)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(usage(anyhow!("--jobs must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Gof { input, replications, significance, inner_fit, chi2_bins } => cmd_gof(
            input,
            BootstrapConfig {
                replications: *replications,
                significance: *significance,
                inner_fit: match inner_fit {
                    InnerFitArg::Mle => InnerFit::FullMle,
                    InnerFitArg::Quantile => InnerFit::FastQuantile,
                },
                master_seed: cli.seed,
                chi2_bins: *chi2_bins,
            },
        ),
        Command::Tailstudy { alpha, beta, gamma, mu, sizes, seeds, out } => {
            let p = StableParams::new(*alpha, *beta, *gamma, *mu).map_err(usage)?;
            cmd_tailstudy(p, sizes, *seeds, cli.seed, out)
        }
        Command::Hist { input, bins } => cmd_hist(input, *bins),
        Command::Simulate { model, params, n, start_price, start_date, output } => {
            cmd_simulate(*model, params, *n, *start_price, *start_date, output, cli.seed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
