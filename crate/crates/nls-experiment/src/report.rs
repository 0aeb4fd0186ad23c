use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use nls_solver::write_conserved_csv;
use nls_spectral::io::fmt_num;

use crate::{ExperimentError, ScalingReport, ValidationReport};

fn table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().map(fmt_num))?;
    }
    w.flush()?;
    Ok(())
}

fn json(path: &Path, value: &impl serde::Serialize) -> Result<(), ExperimentError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

/// Writes `config.json`, `trajectory.csv`, `conserved.csv`, `monitor.csv`,
/// `heatmap.csv` (long format `x, t, |u|`), `ridge.csv` and `summary.json`.
pub fn emit_report(report: &ValidationReport, dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    json(&dir.join("config.json"), &report.config)?;
    table(
        &dir.join("trajectory.csv"),
        &[
            "t", "mu", "a", "theta", "v", "w_h1", "ode_mu", "ode_a", "ode_theta", "ode_v", "closed_form_a", "error_h1",
            "ablation_error_h1", "manifold_gap", "asymmetry", "newton_iterations",
        ],
        report.rows.iter().map(|r| {
            vec![
                r.t, r.mu, r.a, r.theta, r.v, r.w_h1, r.ode_mu, r.ode_a, r.ode_theta, r.ode_v, r.closed_form_a, r.error_h1,
                r.ablation_error_h1, r.manifold_gap, r.asymmetry, r.newton_iterations as f64,
            ]
        }),
    )?;
    write_conserved_csv(&report.conserved, BufWriter::new(File::create(dir.join("conserved.csv"))?))?;
    if let Some(m) = &report.monitor {
        table(
            &dir.join("monitor.csv"),
            &["t", "L", "dL_dt", "w_h1", "bound_rhs", "coercivity_ratio"],
            m.rows.iter().map(|r| vec![r.t, r.l, r.dl_dt, r.w_h1, r.bound_rhs, r.coercivity_ratio]),
        )?;
    }
    let hm = &report.heatmap;
    table(
        &dir.join("heatmap.csv"),
        &["x", "t", "abs_u"],
        hm.t.iter().zip(&hm.values).flat_map(|(t, vals)| hm.x.iter().zip(vals).map(move |(x, v)| vec![*x, *t, *v])),
    )?;
    table(&dir.join("ridge.csv"), &["t", "left", "right"], report.ridges.iter().map(|r| vec![r.t, r.left, r.right]))?;
    json(&dir.join("summary.json"), &report.summary)
}

/// Per-run directories `a0_<a0>` plus `scaling.csv` and `summary.json` at the top.
pub fn emit_scaling(report: &ScalingReport, dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    for r in &report.runs {
        emit_report(r, &dir.join(format!("a0_{}", r.summary.a0)))?;
    }
    table(
        &dir.join("scaling.csv"),
        &["a0", "h", "max_h1_error", "max_w_h1"],
        report.points.iter().map(|p| vec![p.a0, p.h, p.max_h1_error, p.max_w_h1]),
    )?;
    let max_h1_error = report.points.iter().map(|p| p.max_h1_error).fold(0.0, f64::max);
    json(
        &dir.join("summary.json"),
        &serde_json::json!({
            "slope": report.slope,
            "intercept": report.intercept,
            "residual": report.residual,
            "max_h1_error": max_h1_error,
            "points": report.points,
        }),
    )
}
