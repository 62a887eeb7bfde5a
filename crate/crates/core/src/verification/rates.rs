use serde::Serialize;

use crate::error::{Error, Result};

/// One point of a convergence study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateSample {
    #[serde(rename = "eps_or_N")]
    pub eps_or_n: f64,
    pub error: f64,
}

/// What a fitted rate has to satisfy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateTarget {
    Band {
        center: f64,
        tolerance: f64,
    },
    AtLeast(f64),
    /// Errors must fall strictly along the sample order.
    Decreasing,
}

impl RateTarget {
    fn accepts(&self, rate: f64, samples: &[RateSample]) -> bool {
        match *self {
            RateTarget::Band { center, tolerance } => (rate - center).abs() <= tolerance,
            RateTarget::AtLeast(min) => rate >= min,
            RateTarget::Decreasing => samples.windows(2).all(|w| w[1].error < w[0].error),
        }
    }
}

/// Log-log least-squares fit of an error sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub check: String,
    pub parameters: serde_json::Value,
    pub samples: Vec<RateSample>,
    pub fitted_rate: f64,
    pub pass: bool,
    #[serde(skip)]
    pub target: RateTarget,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::RateFit("need at least two paired samples".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::RateFit("samples must be positive and finite".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::RateFit("abscissae are all equal".into()));
    }
    Ok(sxy / sxx)
}

impl RateReport {
    /// A rate study with at least four samples over at least two decades.
    pub fn new(
        check: impl Into<String>,
        parameters: serde_json::Value,
        samples: Vec<RateSample>,
        target: RateTarget,
    ) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::RateFit(format!(
                "{} samples; at least 4 required",
                samples.len()
            )));
        }
        let (lo, hi) = samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
            (lo.min(s.eps_or_n), hi.max(s.eps_or_n))
        });
        if (hi / lo).log10() < 2.0 - 1e-9 {
            return Err(Error::RateFit(format!(
                "samples span {lo}..{hi}, less than two decades"
            )));
        }
        Self::short(check, parameters, samples, target)
    }

    /// A rate study without the sample-count and span requirements, for
    /// sweeps whose range is fixed externally (or capped by roundoff).
    pub fn short(
        check: impl Into<String>,
        parameters: serde_json::Value,
        samples: Vec<RateSample>,
        target: RateTarget,
    ) -> Result<Self> {
        let x: Vec<f64> = samples.iter().map(|s| s.eps_or_n).collect();
        let y: Vec<f64> = samples.iter().map(|s| s.error).collect();
        let fitted_rate = fit_log_slope(&x, &y)?;
        Ok(RateReport {
            check: check.into(),
            parameters,
            pass: target.accepts(fitted_rate, &samples),
            samples,
            fitted_rate,
            target,
        })
    }
}
