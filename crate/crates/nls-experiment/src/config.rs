use std::path::PathBuf;

use nls_effective::ThetaCoupling;
use nls_soliton::Phase;
use nls_solver::Scheme;
use nls_spectral::Grid;
use serde::{Deserialize, Serialize};

use crate::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TEndMode {
    /// `in_phase_factor·h⁻¹` for σ = 0, `min(h⁻¹ log h⁻¹, t_budget)` for σ = 1.
    #[default]
    Auto,
    Explicit,
}

/// Which reduced dynamics supplies the prediction `z̃(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OdeVariant {
    /// `ȧ = v` with the `μ` and `θ` equations, by RK4.
    #[default]
    Theorem,
    /// `ȧ = v/μ + (-1)^σ(-4a + 2π²/3)v e^{-2a}`.
    Reduced,
    /// The eight-dimensional system from the quadrature interaction gradient.
    General,
    /// Exact `(a, v)`, `μ` from its first integral, `θ` by quadrature in time.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub n: Option<usize>,
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub a0: f64,
    pub sigma: Phase,
    pub t_end_mode: TEndMode,
    /// Used when `t_end_mode` is explicit.
    pub t_end: Option<f64>,
    /// Auto horizon for σ = 0, in units of `h⁻¹`. Must stay below the
    /// collision time `π/4`.
    pub in_phase_factor: f64,
    /// Cap on the auto horizon for σ = 1.
    pub t_budget: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub grid: GridOverrides,
    /// Spectral cutoff applied every step; `None` disables it. The default
    /// sits below the first split-step resonance at `dt = 5e-3`.
    pub cutoff: Option<f64>,
    /// Steps between samples; by default about `target_samples` samples, and
    /// no more than `max_sample_interval` apart when the monitor is on.
    pub sample_stride: Option<usize>,
    pub target_samples: usize,
    pub max_sample_interval: f64,
    pub ode_variant: OdeVariant,
    pub theta_coupling: ThetaCoupling,
    /// Include `ν_z` in `ũ` for the Lyapunov diagnostics.
    pub correction: bool,
    /// Evaluate `L` and `‖w̃‖` at every sample.
    pub monitor: bool,
    /// Columns of the `|u|` heatmap.
    pub heatmap_points: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            a0: 5.0,
            sigma: Phase::Opposite,
            t_end_mode: TEndMode::Auto,
            t_end: None,
            in_phase_factor: 0.7,
            t_budget: 2000.0,
            dt: 5e-3,
            scheme: Scheme::Yoshida4,
            grid: GridOverrides::default(),
            cutoff: Some(24.0),
            sample_stride: None,
            target_samples: 400,
            max_sample_interval: 0.5,
            ode_variant: OdeVariant::Theorem,
            theta_coupling: ThetaCoupling::Derived,
            correction: true,
            monitor: true,
            heatmap_points: 256,
            output_dir: None,
        }
    }
}

/// Quantities derived from a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved {
    pub h: f64,
    pub t_end: f64,
    pub steps: usize,
    pub sample_stride: usize,
    pub n: usize,
    pub length: f64,
}

/// Default cell: at least `24a₀` long with `dx` of 0.04 or 0.05 and a power
/// of two nodes, which keeps `dt·k_max²` inside the solver guard at `dt = 5e-3`.
pub fn default_grid(a0: f64) -> (usize, f64) {
    let span = 24.0 * a0;
    let n = ((span / 0.05).ceil() as usize).next_power_of_two();
    let l = 0.04 * n as f64;
    (n, if l >= span { l } else { 0.05 * n as f64 })
}

impl ExperimentConfig {
    pub fn h(&self) -> f64 {
        (-self.a0).exp()
    }

    pub fn t_end(&self) -> Result<f64, ExperimentError> {
        let h = self.h();
        match self.t_end_mode {
            TEndMode::Explicit => self
                .t_end
                .ok_or_else(|| ExperimentError::Config("t_end_mode = explicit needs t_end".into())),
            TEndMode::Auto => Ok(match self.sigma {
                Phase::In => self.in_phase_factor / h,
                Phase::Opposite => (h.recip() * h.recip().ln()).min(self.t_budget),
            }),
        }
    }

    pub fn grid(&self) -> Result<Grid, ExperimentError> {
        let (n, l) = default_grid(self.a0);
        Ok(Grid::new(self.grid.n.unwrap_or(n), self.grid.length.unwrap_or(l))?)
    }

    pub fn resolve(&self) -> Result<Resolved, ExperimentError> {
        if !(self.a0 >= 3.0 && self.a0.is_finite()) {
            return Err(ExperimentError::Config(format!("a0 must be at least 3, got {}", self.a0)));
        }
        let t_end = self.t_end()?;
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(ExperimentError::Config(format!("t_end must be nonnegative, got {t_end}")));
        }
        let h = self.h();
        if self.sigma == Phase::In && 2.0 * h * t_end >= 0.5 * std::f64::consts::PI {
            return Err(ExperimentError::Config(format!(
                "σ = 0 horizon {t_end} reaches the collision time π/(4h) = {}",
                0.25 * std::f64::consts::PI / h
            )));
        }
        if !(self.dt > 0.0) {
            return Err(ExperimentError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        let g = self.grid()?;
        if g.length() < 4.0 * self.a0 + 20.0 {
            return Err(ExperimentError::Config(format!("cell of length {} is too short for a0 = {}", g.length(), self.a0)));
        }
        let steps = (t_end / self.dt).round() as usize;
        let sample_stride = match self.sample_stride {
            Some(0) => return Err(ExperimentError::Config("sample_stride must be at least 1".into())),
            Some(s) => s,
            None => {
                let s = (steps / self.target_samples.max(1)).max(1);
                if self.monitor {
                    s.min(((self.max_sample_interval / self.dt).floor() as usize).max(1))
                } else {
                    s
                }
            }
        };
        Ok(Resolved { h, t_end: steps as f64 * self.dt, steps, sample_stride, n: g.n(), length: g.length() })
    }
}
