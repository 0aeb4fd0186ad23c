use rayon::prelude::*;
use serde::Serialize;

use crate::{run_case, ExperimentConfig, ExperimentError, ValidationReport};

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub a0: f64,
    pub h: f64,
    pub max_h1_error: f64,
    pub max_w_h1: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Slope of `log max_t E` against `log h`.
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    #[serde(skip)]
    pub runs: Vec<ValidationReport>,
}

/// Runs `base` at every `a₀` (in parallel) and fits the error exponent.
pub fn scaling_study(a0_list: &[f64], base: &ExperimentConfig) -> Result<ScalingReport, ExperimentError> {
    if a0_list.len() < 3 {
        return Err(ExperimentError::Config("need ≥ 3 points".into()));
    }
    let mut runs = a0_list
        .par_iter()
        .map(|&a0| run_case(&ExperimentConfig { a0, ..base.clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(r) = runs.iter().find(|r| r.summary.aborted.is_some()) {
        return Err(ExperimentError::Numerical(format!(
            "run at a0 = {} aborted: {}",
            r.summary.a0,
            r.summary.aborted.as_deref().unwrap_or_default()
        )));
    }
    let points: Vec<ScalingPoint> = runs
        .iter()
        .map(|r| ScalingPoint {
            a0: r.summary.a0,
            h: r.summary.h,
            max_h1_error: r.summary.max_h1_error,
            max_w_h1: r.summary.max_w_h1,
            passed: r.summary.passed,
        })
        .collect();
    let x: Vec<f64> = points.iter().map(|p| p.h.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.max_h1_error.ln()).collect();
    let (slope, intercept, residual) = fit_line(&x, &y);
    for r in &mut runs {
        r.summary.slope = Some(slope);
    }
    Ok(ScalingReport { points, slope, intercept, residual, runs })
}
