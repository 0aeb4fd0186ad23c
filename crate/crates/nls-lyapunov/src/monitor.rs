//! `L_z(u(t))` along a sampled trajectory, with its finite-difference rate
//! compared against the growth bound `h‖w̃‖² + h³‖w̃‖ + ‖w̃‖³`.

use nls_soliton::ZCoords;
use nls_spectral::{h1_norm, Field};
use serde::Serialize;

use crate::{CutoffPair, L};

/// One trajectory sample: the field, its modulation parameters and `ũ_z`.
#[derive(Debug, Clone, Copy)]
pub struct MonitorInput<'a> {
    pub t: f64,
    pub u: &'a Field,
    pub z: ZCoords,
    pub u_tilde: &'a Field,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonitorRow {
    pub t: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// Centered difference; one-sided at the ends.
    #[serde(rename = "dL/dt")]
    pub dl_dt: f64,
    pub w_h1: f64,
    pub bound_rhs: f64,
    /// `L/‖w̃‖²`, the sampled coercivity ratio.
    pub coercivity_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorReport {
    pub rows: Vec<MonitorRow>,
    /// Least-squares `C` in `|dL/dt| ≈ C·bound_rhs`, i.e. `Σ|dL/dt|·b / Σb²`.
    pub fitted_constant: f64,
    /// Rows with `|dL/dt|` above ten times the fitted constant times the bound.
    pub violations: usize,
}

impl MonitorReport {
    pub fn violation_fraction(&self) -> f64 {
        self.violations as f64 / self.rows.len().max(1) as f64
    }
}

/// `h` is the interaction scale `e^{-a₀}` of the run.
pub fn monitor(samples: &[MonitorInput<'_>], cut: &CutoffPair, h: f64) -> MonitorReport {
    let values: Vec<(f64, f64, f64)> =
        samples.iter().map(|s| (s.t, L(&s.z, s.u, cut, s.u_tilde), h1_norm(&(s.u - s.u_tilde)))).collect();
    summarize(&values, h)
}

/// The same report from already computed `(t, L, ‖w̃‖_{H¹})` triples, for
/// runs that evaluate `L` on the fly instead of storing fields.
pub fn summarize(values: &[(f64, f64, f64)], h: f64) -> MonitorReport {
    let n = values.len();
    let rows: Vec<MonitorRow> = values
        .iter()
        .enumerate()
        .map(|(k, &(t, l, w))| {
            let dl_dt = if n < 2 {
                0.0
            } else {
                let (i, j) = (k.saturating_sub(1), (k + 1).min(n - 1));
                (values[j].1 - values[i].1) / (values[j].0 - values[i].0)
            };
            let bound_rhs = h * w * w + h.powi(3) * w + w.powi(3);
            let coercivity_ratio = if w > 0.0 { l / (w * w) } else { 0.0 };
            MonitorRow { t, l, dl_dt, w_h1: w, bound_rhs, coercivity_ratio }
        })
        .collect();
    let fitted_constant = fit_constant(&rows);
    let violations = count_violations(&rows, fitted_constant);
    MonitorReport { rows, fitted_constant, violations }
}

/// Least-squares constant through the origin for `|dL/dt|` against the bound.
pub fn fit_constant(rows: &[MonitorRow]) -> f64 {
    let (num, den) = rows
        .iter()
        .fold((0.0, 0.0), |(n, d), r| (n + r.dl_dt.abs() * r.bound_rhs, d + r.bound_rhs * r.bound_rhs));
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Rows whose rate exceeds ten times `c` times the bound.
pub fn count_violations(rows: &[MonitorRow], c: f64) -> usize {
    rows.iter().filter(|r| r.dl_dt.abs() > 10.0 * c * r.bound_rhs).count()
}
