//! Daily price series, log-returns and descriptive statistics.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReturnsError {
    #[error("cannot open {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("fewer than 2 prices")]
    TooFewPrices,
    #[error("need at least {needed} returns, got {got}")]
    TooFewReturns { needed: usize, got: usize },
    #[error("zero variance: moments beyond the mean are undefined")]
    ZeroVariance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
    /// Rows dropped because the close was blank.
    pub skipped_missing: usize,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, closes: Vec<f64>) -> Result<Self, ReturnsError> {
        let s = Self {
            dates,
            closes,
            skipped_missing: 0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    fn validate(&self) -> Result<(), ReturnsError> {
        if self.dates.len() != self.closes.len() {
            return Err(ReturnsError::Validation(format!(
                "{} dates but {} closes",
                self.dates.len(),
                self.closes.len()
            )));
        }
        if self.closes.len() < 2 {
            return Err(ReturnsError::TooFewPrices);
        }
        for w in self.dates.windows(2) {
            if w[1] == w[0] {
                return Err(ReturnsError::Validation(format!("duplicate date {}", w[1])));
            }
            if w[1] < w[0] {
                return Err(ReturnsError::Validation(format!(
                    "dates not ascending: {} follows {}",
                    w[1], w[0]
                )));
            }
        }
        for (d, &c) in self.dates.iter().zip(&self.closes) {
            if !(c > 0.0 && c.is_finite()) {
                return Err(ReturnsError::Validation(format!("non-positive close {c} on {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    pub source_label: String,
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f.eq_ignore_ascii_case("na") || f.eq_ignore_ascii_case("null")
}

/// Parses `date,close` CSV text.
pub fn parse_prices_csv<R: Read>(reader: R) -> Result<PriceSeries, ReturnsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let line_of = |e: &csv::Error| e.position().map_or(0, |p| p.line());
    let headers = rdr
        .headers()
        .map_err(|e| ReturnsError::Parse {
            line: line_of(&e).max(1),
            message: e.to_string(),
        })?
        .clone();
    if headers.len() != 2
        || !headers[0].eq_ignore_ascii_case("date")
        || !headers[1].eq_ignore_ascii_case("close")
    {
        return Err(ReturnsError::Parse {
            line: 1,
            message: format!("expected header `date,close`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut dates = Vec::new();
    let mut closes = Vec::new();
    let mut skipped = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ReturnsError::Parse {
            line: line_of(&e),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| ReturnsError::Parse {
            line,
            message: format!("bad date `{}`: {e}", &rec[0]),
        })?;
        if is_missing(&rec[1]) {
            skipped += 1;
            continue;
        }
        let close: f64 = rec[1].parse().map_err(|_| ReturnsError::Parse {
            line,
            message: format!("bad close `{}`", &rec[1]),
        })?;
        dates.push(date);
        closes.push(close);
    }
    let mut s = PriceSeries::new(dates, closes)?;
    s.skipped_missing = skipped;
    Ok(s)
}

pub fn load_prices_csv(path: &Path) -> Result<PriceSeries, ReturnsError> {
    let f = File::open(path).map_err(|source| ReturnsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_prices_csv(f)
}

pub fn write_prices_csv<W: Write>(out: W, prices: &PriceSeries) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "close"])?;
    for (d, c) in prices.dates.iter().zip(&prices.closes) {
        w.write_record([d.format("%Y-%m-%d").to_string(), format!("{c}")])?;
    }
    w.flush()
}

/// `S(t) = ln Y(t+1) - ln Y(t)`.
pub fn log_returns(prices: &PriceSeries, source_label: &str) -> ReturnSeries {
    let values = prices
        .closes
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect();
    ReturnSeries {
        values,
        source_label: source_label.to_string(),
    }
}

/// Prices `start * exp(cumsum(returns))` on consecutive weekdays from `first`.
pub fn prices_from_returns(returns: &[f64], start: f64, first: NaiveDate) -> Result<PriceSeries, ReturnsError> {
    let mut closes = Vec::with_capacity(returns.len() + 1);
    let mut level = start.ln();
    closes.push(start);
    for r in returns {
        level += r;
        closes.push(level.exp());
    }
    let mut dates = Vec::with_capacity(closes.len());
    let mut d = first;
    for _ in 0..closes.len() {
        while matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            d = d.succ_opt().expect("date in range");
        }
        dates.push(d);
        d = d.succ_opt().expect("date in range");
    }
    PriceSeries::new(dates, closes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std_dev: f64,
    pub skewness: f64,
    /// Pearson kurtosis (3 for a Gaussian).
    pub kurtosis: f64,
}

/// Mean, sample standard deviation, and the standardized third and fourth
/// central moments (population normalisation).
pub fn summary_stats(returns: &[f64]) -> Result<SummaryStats, ReturnsError> {
    if returns.len() < 4 {
        return Err(ReturnsError::TooFewReturns {
            needed: 4,
            got: returns.len(),
        });
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in returns {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if !(m2 > 0.0) {
        return Err(ReturnsError::ZeroVariance);
    }
    let std_dev = (m2 / (n - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    Ok(SummaryStats {
        mean,
        std_dev,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mu: f64,
    /// Maximum-likelihood scale (`n` denominator).
    pub sigma: f64,
    /// Unbiased-variance scale (`n - 1` denominator).
    pub sigma_unbiased: f64,
    pub log_likelihood: f64,
}

pub fn gaussian_fit(returns: &[f64]) -> Result<GaussianFit, ReturnsError> {
    if returns.len() < 2 {
        return Err(ReturnsError::TooFewReturns {
            needed: 2,
            got: returns.len(),
        });
    }
    let n = returns.len() as f64;
    let mu = returns.iter().sum::<f64>() / n;
    let ss: f64 = returns.iter().map(|x| (x - mu) * (x - mu)).sum();
    if !(ss > 0.0) {
        return Err(ReturnsError::ZeroVariance);
    }
    let sigma = (ss / n).sqrt();
    Ok(GaussianFit {
        mu,
        sigma,
        sigma_unbiased: (ss / (n - 1.0)).sqrt(),
        log_likelihood: gaussian_loglik(returns, mu, sigma),
    })
}

pub fn gaussian_loglik(x: &[f64], mu: f64, sigma: f64) -> f64 {
    let n = x.len() as f64;
    let ss: f64 = x.iter().map(|v| (v - mu) * (v - mu)).sum();
    -0.5 * n * (2.0 * std::f64::consts::PI).ln() - n * sigma.ln() - ss / (2.0 * sigma * sigma)
}
