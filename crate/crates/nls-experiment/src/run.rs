//! One validation run: evolve the case data, decompose every sample, compare
//! against the reduced prediction.

use log::{info, warn};
use nls_correction::build_correction;
use nls_effective::{closed_form, rhs_theorem, EffectiveState, RhsOptions};
use nls_lyapunov::{make_cutoffs, summarize, CutoffPair, MonitorReport, L};
use nls_soliton::{case_initial_data, two_soliton, Phase, ZCoords};
use nls_solver::{Sample, Stepper};
use nls_spectral::{h1_norm, Field, Grid};
use nls_symplectic::{decompose, DecomposeOptions};
use serde::Serialize;

use crate::predict::Predictor;
use crate::{ExperimentConfig, ExperimentError, OdeVariant, Resolved};

/// Per-sample record. `(mu, a, theta, v)` are read off the decomposition,
/// `ode_*` come from the prediction `z̃`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampleRow {
    pub t: f64,
    pub mu: f64,
    pub a: f64,
    pub theta: f64,
    pub v: f64,
    /// Largest deviation of the extracted `z` from a symmetric state.
    pub asymmetry: f64,
    pub w_h1: f64,
    pub ode_mu: f64,
    pub ode_a: f64,
    pub ode_theta: f64,
    pub ode_v: f64,
    pub closed_form_a: f64,
    /// `‖u - u_z̃‖_{H¹}`.
    pub error_h1: f64,
    /// The same with `μ` frozen at 1 in the `θ` equation.
    pub ablation_error_h1: f64,
    /// `‖u_z - u_z̃‖_{H¹}`.
    pub manifold_gap: f64,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RidgeRow {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

/// `|u|` on a coarse subset of nodes at every sample.
#[derive(Debug, Clone, Default)]
pub struct Heatmap {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub a0: f64,
    pub sigma: Phase,
    pub h: f64,
    pub t_end: f64,
    pub samples: usize,
    pub max_h1_error: f64,
    pub max_h1_error_ablation: f64,
    pub max_w_h1: f64,
    pub max_manifold_gap: f64,
    /// `max E ≤ max ‖w‖ + max ‖u_z - u_z̃‖`, and the same sample by sample.
    pub triangle_ok: bool,
    pub a_monotone: bool,
    /// σ = 0 only: extracted `v ≤ 0` at every sample.
    pub v_sign_ok: Option<bool>,
    pub ridge_monotone: bool,
    pub max_closed_form_deviation: f64,
    /// `20h²a₀`.
    pub closed_form_tolerance: f64,
    pub closed_form_ok: bool,
    pub max_asymmetry: f64,
    pub energy_drift: f64,
    pub mass_drift: f64,
    pub lyapunov_constant: Option<f64>,
    pub lyapunov_violation_fraction: Option<f64>,
    /// Filled in by scaling studies.
    pub slope: Option<f64>,
    pub aborted: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub rows: Vec<SampleRow>,
    pub conserved: Vec<Sample>,
    pub ridges: Vec<RidgeRow>,
    pub heatmap: Heatmap,
    pub monitor: Option<MonitorReport>,
    pub final_field: Field,
    pub summary: Summary,
}

/// `ż` of the reduced system at the symmetric part of `z`, in 8 coordinates.
fn lifted_velocity(z: &ZCoords, sigma: Phase) -> [f64; 8] {
    let [m, a, t, v] = rhs_theorem(&EffectiveState::from_z(z, sigma));
    [m, -a, m, a, t, -v, t, v]
}

/// Peak of `|u|` on one half line, refined by a parabola through the
/// largest node and its neighbours.
fn ridge(u: &Field, right: bool) -> f64 {
    let g = u.grid();
    let vals = u.values();
    let n = g.n();
    let mut best = (0, -1.0);
    for j in 1..n - 1 {
        let x = g.x(j);
        if (x > 0.0) == right && x != 0.0 && vals[j].norm() > best.1 {
            best = (j, vals[j].norm());
        }
    }
    let j = best.0.clamp(1, n - 2);
    let (l, c, r) = (vals[j - 1].norm(), vals[j].norm(), vals[j + 1].norm());
    let den = l - 2.0 * c + r;
    let off = if den < 0.0 { 0.5 * (l - r) / den } else { 0.0 };
    g.x(j) + off * g.dx()
}

fn strictly_monotone(xs: impl Iterator<Item = f64>, increasing: bool) -> bool {
    let xs: Vec<f64> = xs.collect();
    xs.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

struct Tracker<'a> {
    cfg: &'a ExperimentConfig,
    grid: Grid,
    cut: CutoffPair,
    predictor: Predictor,
    ablation: Predictor,
    z: ZCoords,
    last_t: f64,
    rows: Vec<SampleRow>,
    conserved: Vec<Sample>,
    ridges: Vec<RidgeRow>,
    heatmap: Heatmap,
    lyapunov: Vec<(f64, f64, f64)>,
    heat_stride: usize,
    /// Samples between heatmap rows.
    heat_every: usize,
}

impl Tracker<'_> {
    fn sample(&mut self, step: usize, t: f64, u: &Field) -> Result<(), ExperimentError> {
        let sigma = self.cfg.sigma;
        if !u.is_finite() {
            return Err(ExperimentError::Numerical(format!("field became non-finite by t = {t}")));
        }
        self.conserved.push(Sample::of(step, t, u));

        let vel = lifted_velocity(&self.z, sigma);
        let base = self.z.to_array();
        let guess = ZCoords::from_array(std::array::from_fn(|i| base[i] + (t - self.last_t) * vel[i]));
        let dec = decompose(u, &guess, &DecomposeOptions::default())
            .map_err(|e| ExperimentError::Numerical(format!("decomposition at t = {t}: {e}")))?;
        self.z = dec.z;
        self.last_t = t;
        let sym = EffectiveState::from_z(&dec.z, sigma);
        let zs = sym.embed();
        let asymmetry = dec.z.to_array().iter().zip(zs.to_array()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

        let zt = self.predictor.advance(t)?;
        let za = self.ablation.advance(t)?;
        let uzt = two_soliton(&zt, self.grid);
        let uz = u - &dec.w;
        let error_h1 = h1_norm(&(u - &uzt));
        let ablation_error_h1 = h1_norm(&(u - &two_soliton(&za, self.grid)));
        let manifold_gap = h1_norm(&(&uz - &uzt));
        let closed_form_a = closed_form(self.cfg.a0, sigma, t).map(|(a, _)| a).unwrap_or(f64::NAN);
        let pred = EffectiveState::from_z(&zt, sigma);
        self.rows.push(SampleRow {
            t,
            mu: sym.mu,
            a: sym.a,
            theta: sym.theta,
            v: sym.v,
            asymmetry,
            w_h1: h1_norm(&dec.w),
            ode_mu: pred.mu,
            ode_a: pred.a,
            ode_theta: pred.theta,
            ode_v: pred.v,
            closed_form_a,
            error_h1,
            ablation_error_h1,
            manifold_gap,
            newton_iterations: dec.iterations,
        });

        if self.cfg.monitor {
            let mut ut = two_soliton(&zs, self.grid);
            if self.cfg.correction {
                ut += &build_correction(&zs, self.grid)
                    .map_err(|e| ExperimentError::Numerical(format!("correction at t = {t}: {e}")))?;
            }
            self.lyapunov.push((t, L(&zs, u, &self.cut, &ut), h1_norm(&(u - &ut))));
        }

        self.ridges.push(RidgeRow { t, left: ridge(u, false), right: ridge(u, true) });
        if (self.rows.len() - 1) % self.heat_every == 0 {
            self.heatmap.t.push(t);
            self.heatmap.values.push(u.values().iter().step_by(self.heat_stride).map(|c| c.norm()).collect());
        }
        Ok(())
    }
}

/// Runs one case. Configuration errors are returned; numerical failures during
/// the run stop it and come back as a report with `summary.aborted` set.
pub fn run_case(cfg: &ExperimentConfig) -> Result<ValidationReport, ExperimentError> {
    let resolved = cfg.resolve()?;
    let grid = cfg.grid()?;
    let (a0, sigma) = (cfg.a0, cfg.sigma);
    info!(
        "run a0 = {a0}, σ = {sigma}: T = {:.3}, {} steps of {:?}, grid {} / {}",
        resolved.t_end, resolved.steps, cfg.scheme, resolved.n, resolved.length
    );
    let mut u = case_initial_data(a0, sigma, grid)?;
    let mut stepper = Stepper::with_scheme(grid, cfg.dt, cfg.scheme)?;
    if let Some(kc) = cfg.cutoff {
        stepper = stepper.with_cutoff(kc)?;
    }
    let opts = RhsOptions { coupling: cfg.theta_coupling, freeze_mu_in_theta: false };
    let ablation_variant = match cfg.ode_variant {
        OdeVariant::General => OdeVariant::Theorem,
        v => v,
    };
    let heat_stride = (grid.n() / cfg.heatmap_points.clamp(1, grid.n())).max(1);
    let mut tr = Tracker {
        cfg,
        grid,
        cut: make_cutoffs(a0, grid),
        predictor: Predictor::new(cfg.ode_variant, a0, sigma, opts),
        ablation: Predictor::new(ablation_variant, a0, sigma, RhsOptions { freeze_mu_in_theta: true, ..opts }),
        z: EffectiveState::initial(a0, sigma).embed(),
        last_t: 0.0,
        rows: Vec::new(),
        conserved: Vec::new(),
        ridges: Vec::new(),
        heatmap: Heatmap { x: (0..grid.n()).step_by(heat_stride).map(|j| grid.x(j)).collect(), ..Default::default() },
        lyapunov: Vec::new(),
        heat_stride,
        heat_every: (resolved.steps / resolved.sample_stride).div_ceil(cfg.target_samples.max(1)).max(1),
    };
    let mut aborted = tr.sample(0, 0.0, &u).err().map(|e| e.to_string());
    if aborted.is_none() {
        for k in 1..=resolved.steps {
            stepper.step(&mut u);
            if k % resolved.sample_stride == 0 || k == resolved.steps {
                if let Err(e) = tr.sample(k, k as f64 * cfg.dt, &u) {
                    aborted = Some(e.to_string());
                    break;
                }
            }
        }
    }
    if let Some(e) = &aborted {
        warn!("run a0 = {a0}, σ = {sigma} aborted: {e}");
    }
    let monitor = (cfg.monitor && !tr.lyapunov.is_empty()).then(|| summarize(&tr.lyapunov, resolved.h));
    let summary = summarize_run(cfg, &resolved, &tr.rows, &tr.conserved, &tr.ridges, monitor.as_ref(), aborted);
    Ok(ValidationReport {
        config: cfg.clone(),
        resolved,
        rows: tr.rows,
        conserved: tr.conserved,
        ridges: tr.ridges,
        heatmap: tr.heatmap,
        monitor,
        final_field: u,
        summary,
    })
}

/// Largest fraction of Lyapunov samples allowed above ten times the fitted constant.
pub const MAX_VIOLATION_FRACTION: f64 = 0.01;

fn summarize_run(
    cfg: &ExperimentConfig,
    resolved: &Resolved,
    rows: &[SampleRow],
    conserved: &[Sample],
    ridges: &[RidgeRow],
    monitor: Option<&MonitorReport>,
    aborted: Option<String>,
) -> Summary {
    let max = |f: fn(&SampleRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let (max_e, max_w, max_gap) = (max(|r| r.error_h1), max(|r| r.w_h1), max(|r| r.manifold_gap));
    let slack = |x: f64| x * (1.0 + 1e-12) + 1e-15;
    let triangle_ok = max_e <= slack(max_w + max_gap)
        && rows.iter().all(|r| r.error_h1 <= slack(r.w_h1 + r.manifold_gap));
    let increasing = cfg.sigma == Phase::Opposite;
    let a_monotone = strictly_monotone(rows.iter().map(|r| r.a), increasing);
    let v_sign_ok = (cfg.sigma == Phase::In).then(|| rows.iter().all(|r| r.v <= 0.0));
    let ridge_monotone = ridges.windows(2).all(|w| if increasing { w[1].right >= w[0].right } else { w[1].right <= w[0].right });
    let h = resolved.h;
    let max_dev = max(|r| (r.a - r.closed_form_a).abs());
    let tol = 20.0 * h * h * cfg.a0;
    let drift = |q: fn(&Sample) -> f64| {
        let q0 = conserved.first().map(q).unwrap_or(0.0);
        conserved.iter().map(|s| (q(s) - q0).abs() / q0.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
    };
    let violation = monitor.map(|m| m.violation_fraction());
    let closed_form_ok = max_dev <= tol;
    let passed = aborted.is_none()
        && triangle_ok
        && a_monotone
        && v_sign_ok.unwrap_or(true)
        && closed_form_ok
        && violation.map_or(true, |f| f < MAX_VIOLATION_FRACTION);
    Summary {
        a0: cfg.a0,
        sigma: cfg.sigma,
        h,
        t_end: resolved.t_end,
        samples: rows.len(),
        max_h1_error: max_e,
        max_h1_error_ablation: max(|r| r.ablation_error_h1),
        max_w_h1: max_w,
        max_manifold_gap: max_gap,
        triangle_ok,
        a_monotone,
        v_sign_ok,
        ridge_monotone,
        max_closed_form_deviation: max_dev,
        closed_form_tolerance: tol,
        closed_form_ok,
        max_asymmetry: max(|r| r.asymmetry),
        energy_drift: drift(|s| s.energy),
        mass_drift: drift(|s| s.mass),
        lyapunov_constant: monitor.map(|m| m.fitted_constant),
        lyapunov_violation_fraction: violation,
        slope: None,
        aborted,
        passed,
    }
}
