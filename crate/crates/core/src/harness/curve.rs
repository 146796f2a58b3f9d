use std::io::Write;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Iterations at which errors are recorded: every `stride`, or roughly 20
/// log-spaced points per decade. Always ends at `budget`.
pub fn record_schedule(budget: usize, stride: Option<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = match stride {
        Some(s) => (1..=budget / s).map(|k| k * s).collect(),
        None => {
            let decades = (budget as f64).log10();
            let points = (decades * 20.0).ceil() as usize;
            (0..=points)
                .map(|k| 10f64.powf(k as f64 / 20.0).round() as usize)
                .filter(|&k| k >= 1 && k <= budget)
                .collect()
        }
    };
    out.dedup();
    if out.last() != Some(&budget) {
        out.push(budget);
    }
    out
}

/// Sample quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Errors of every replicate at shared iteration indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub iterations: Vec<usize>,
    /// `per_replicate[r][k]` is replicate `r` at `iterations[k]`.
    pub per_replicate: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub q10: Vec<f64>,
    pub q90: Vec<f64>,
}

impl ErrorCurve {
    pub fn from_replicates(iterations: Vec<usize>, per_replicate: Vec<Vec<f64>>) -> Result<Self> {
        if per_replicate.is_empty() {
            return Err(Error::Argument("no replicates".into()));
        }
        if per_replicate.iter().any(|r| r.len() != iterations.len()) {
            return Err(Error::Argument(
                "replicate lengths differ from the iteration grid".into(),
            ));
        }
        let r = per_replicate.len() as f64;
        let column = |k: usize| per_replicate.iter().map(|row| row[k]).collect::<Vec<_>>();
        let mean = (0..iterations.len())
            .map(|k| column(k).iter().sum::<f64>() / r)
            .collect();
        let q10 = (0..iterations.len()).map(|k| quantile(&column(k), 0.1)).collect();
        let q90 = (0..iterations.len()).map(|k| quantile(&column(k), 0.9)).collect();
        Ok(Self {
            iterations,
            per_replicate,
            mean,
            q10,
            q90,
        })
    }

    pub fn last_mean(&self) -> f64 {
        *self.mean.last().expect("curve is never empty")
    }

    /// `iteration,mean_error,q10,q90` rows.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "iteration,mean_error,q10,q90")?;
        for k in 0..self.iterations.len() {
            writeln!(
                w,
                "{},{:e},{:e},{:e}",
                self.iterations[k], self.mean[k], self.q10[k], self.q90[k]
            )?;
        }
        Ok(())
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope_points(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least two points, got {}",
            x.len().min(y.len())
        )));
    }
    if let Some((a, b)) = x.iter().zip(y).find(|(a, b)| !(**a > 0.0 && **b > 0.0)) {
        return Err(Error::Fit(format!("non-positive point ({a}, {b})")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all x values coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

/// Slope of the mean error over iterations inside `window`.
pub fn loglog_slope(curve: &ErrorCurve, window: RangeInclusive<usize>) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = curve
        .iterations
        .iter()
        .zip(&curve.mean)
        .filter(|(k, _)| window.contains(k))
        .map(|(&k, &e)| (k as f64, e))
        .unzip();
    loglog_slope_points(&x, &y)
}
