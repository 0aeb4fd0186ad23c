use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use nls_effective::{alpha, beta, EffectiveState, Mode, RhsOptions};
use nls_experiment::predict::Predictor;
use nls_experiment::{emit_report, emit_scaling, run_case, scaling_study, ExperimentConfig, ExperimentError, OdeVariant};
use nls_soliton::{case_initial_data, Phase, ZCoords};
use nls_solver::{evolve, read_checkpoint, write_checkpoint, write_conserved_csv, Checkpoint, SolverConfig, SolverError};
use nls_spectral::io::fmt_num;
use nls_spectral::{h1_norm, Field};
use nls_symplectic::{decompose, DecomposeOptions};
use serde_json::{json, Value};

const EXIT_THRESHOLD: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "nls-experiment", version, about = "Two-soliton interaction runs for cubic NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the two-soliton data and log the conserved quantities.
    Simulate(CaseArgs),
    /// Integrate the reduced equations alone.
    Effective {
        #[command(flatten)]
        case: CaseArgs,
        /// Output spacing in time.
        #[arg(long, default_value_t = 1.0)]
        every: f64,
    },
    /// Split a checkpointed field into `u_z + w`.
    Decompose {
        checkpoint: PathBuf,
        /// Phase case used to report symmetric coordinates.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        sigma: Option<u8>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Full validation run against the reduced prediction.
    Validate(CaseArgs),
    /// Validation runs over several `a0` and the fitted error exponent.
    Sweep {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        a0_list: Vec<f64>,
        /// Exit with the threshold code when the slope falls below this.
        #[arg(long, default_value_t = 1.7)]
        min_slope: f64,
    },
    /// Quadrature and asymptotic values of the interaction integrals.
    AlphaTable {
        #[arg(long, value_delimiter = ',', default_value = "4,5,6,7")]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-0.1,0,0.1")]
        xi: Vec<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Flags mirror `ExperimentConfig`; a `--config` file overrides them.
#[derive(Args, Debug, Default)]
struct CaseArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    sigma: Option<u8>,
    /// Explicit horizon; without it the horizon is chosen from `h`.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    in_phase_factor: Option<f64>,
    #[arg(long)]
    t_budget: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// strang or yoshida4.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, conflicts_with = "cutoff")]
    no_cutoff: bool,
    #[arg(long)]
    sample_stride: Option<usize>,
    /// theorem, reduced, general or closed_form.
    #[arg(long)]
    ode_variant: Option<String>,
    /// derived or printed.
    #[arg(long)]
    theta_coupling: Option<String>,
    #[arg(long)]
    no_correction: bool,
    #[arg(long)]
    no_monitor: bool,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

/// Overlays `over` onto `base`, descending into objects.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

impl CaseArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut v = serde_json::to_value(ExperimentConfig::default())?;
        let mut set = |key: &str, val: Value| merge(&mut v, json!({ key: val }));
        if let Some(x) = self.a0 {
            set("a0", json!(x));
        }
        if let Some(x) = self.sigma {
            set("sigma", json!(x));
        }
        if let Some(x) = self.t_end {
            set("t_end_mode", json!("explicit"));
            set("t_end", json!(x));
        }
        if let Some(x) = self.in_phase_factor {
            set("in_phase_factor", json!(x));
        }
        if let Some(x) = self.t_budget {
            set("t_budget", json!(x));
        }
        if let Some(x) = self.dt {
            set("dt", json!(x));
        }
        if let Some(x) = &self.scheme {
            set("scheme", json!(x));
        }
        if let Some(x) = self.n {
            set("grid", json!({ "n": x }));
        }
        if let Some(x) = self.length {
            set("grid", json!({ "length": x }));
        }
        if let Some(x) = self.cutoff {
            set("cutoff", json!(x));
        }
        if self.no_cutoff {
            set("cutoff", Value::Null);
        }
        if let Some(x) = self.sample_stride {
            set("sample_stride", json!(x));
        }
        if let Some(x) = &self.ode_variant {
            set("ode_variant", json!(x));
        }
        if let Some(x) = &self.theta_coupling {
            set("theta_coupling", json!(x));
        }
        if self.no_correction {
            set("correction", json!(false));
        }
        if self.no_monitor {
            set("monitor", json!(false));
        }
        if let Some(x) = &self.output_dir {
            set("output_dir", json!(x));
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            merge(&mut v, file);
        }
        Ok(serde_json::from_value(v).context("invalid configuration")?)
    }
}

fn output_dir(cfg: &ExperimentConfig, fallback: &str) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(fallback))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn simulate(args: &CaseArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let r = cfg.resolve()?;
    let grid = cfg.grid()?;
    let solver = SolverConfig::new(cfg.dt, r.t_end, r.sample_stride, grid)?.with_scheme(cfg.scheme).with_cutoff(cfg.cutoff);
    let u0 = case_initial_data(cfg.a0, cfg.sigma, grid)?;
    let traj = evolve(&u0, &solver, &mut [])?;
    let dir = output_dir(&cfg, "out/simulate");
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(&cfg)?)?;
    write_conserved_csv(&traj.samples, BufWriter::new(File::create(dir.join("conserved.csv"))?))?;
    let last = traj.samples.last().expect("at least the initial sample");
    let ckpt = Checkpoint { t: last.t, dt: cfg.dt, step: last.step as u64, field: traj.final_field.clone() };
    write_checkpoint(&ckpt, BufWriter::new(File::create(dir.join("final.ckpt"))?))?;
    print_json(&json!({
        "t_end": last.t,
        "mass_drift": traj.relative_drift(|s| s.mass),
        "energy_drift": traj.relative_drift(|s| s.energy),
        "output_dir": dir,
    }))?;
    Ok(0)
}

fn effective(args: &CaseArgs, every: f64) -> Result<u8> {
    if !(every > 0.0) {
        bail!("--every must be positive");
    }
    let cfg = args.resolve()?;
    let t_end = cfg.resolve()?.t_end;
    let opts = RhsOptions { coupling: cfg.theta_coupling, freeze_mu_in_theta: false };
    let mut p = Predictor::new(cfg.ode_variant, cfg.a0, cfg.sigma, opts);
    let path = cfg.output_dir.as_ref().map(|d| -> Result<PathBuf> {
        fs::create_dir_all(d)?;
        Ok(d.join("trajectory.csv"))
    });
    let path = path.transpose()?;
    let mut wr = csv::Writer::from_writer(writer(path.as_deref())?);
    let general = cfg.ode_variant == OdeVariant::General;
    if general {
        wr.write_record(["t", "z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8"])?;
    } else {
        wr.write_record(["t", "mu", "a", "theta", "v"])?;
    }
    let count = (t_end / every).ceil() as usize;
    for k in 0..=count {
        let t = (k as f64 * every).min(t_end);
        let z = p.advance(t)?;
        let mut row = vec![fmt_num(t)];
        if general {
            row.extend(z.to_array().iter().map(|c| fmt_num(*c)));
        } else {
            row.extend(EffectiveState::from_z(&z, cfg.sigma).to_array().iter().map(|c| fmt_num(*c)));
        }
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(0)
}

/// Initial guess read off the field: peak height, position and phase on each
/// half line, and the local phase gradient for `v`.
fn peak_guess(u: &Field) -> ZCoords {
    let g = u.grid();
    let ux = u.derivative();
    let peak = |right: bool| {
        let j = (0..g.n())
            .filter(|&j| (g.x(j) > 0.0) == right)
            .max_by(|&i, &j| u.values()[i].norm().total_cmp(&u.values()[j].norm()))
            .expect("grid has nodes on both sides");
        let c = u.values()[j];
        let v = (c.conj() * ux.values()[j]).im / c.norm_sqr();
        [c.norm(), g.x(j), c.arg(), v]
    };
    let [m1, a1, t1, v1] = peak(false);
    let [m2, a2, t2, v2] = peak(true);
    ZCoords::from_array([m1, a1, m2, a2, t1, v1, t2, v2])
}

fn decompose_checkpoint(path: &Path, sigma: Option<u8>, output: Option<&Path>) -> Result<u8> {
    let ckpt = read_checkpoint(File::open(path).with_context(|| format!("opening {}", path.display()))?)?;
    let u = &ckpt.field;
    let d = decompose(u, &peak_guess(u), &DecomposeOptions::default())?;
    let mut out = json!({
        "t": ckpt.t,
        "z": d.z.to_array(),
        "iterations": d.iterations,
        "max_residual": d.max_residual(),
        "w_h1": h1_norm(&d.w),
    });
    if let Some(s) = sigma {
        let sigma = Phase::try_from(s).map_err(anyhow::Error::msg)?;
        out["symmetric"] = serde_json::to_value(EffectiveState::from_z(&d.z, sigma))?;
    }
    let mut w = writer(output)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&out)?)?;
    Ok(0)
}

fn validate(args: &CaseArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let report = run_case(&cfg)?;
    let dir = output_dir(&cfg, "out/validate");
    emit_report(&report, &dir)?;
    let s = &report.summary;
    print_json(s)?;
    info!("wrote {}", dir.display());
    Ok(if s.aborted.is_some() {
        EXIT_NUMERICAL
    } else if s.passed {
        0
    } else {
        EXIT_THRESHOLD
    })
}

fn sweep(args: &CaseArgs, a0_list: &[f64], min_slope: f64) -> Result<u8> {
    let cfg = args.resolve()?;
    let report = scaling_study(a0_list, &cfg)?;
    let dir = output_dir(&cfg, "out/sweep");
    emit_scaling(&report, &dir)?;
    print_json(&json!({ "slope": report.slope, "intercept": report.intercept, "residual": report.residual, "points": report.points }))?;
    Ok(if report.slope >= min_slope { 0 } else { EXIT_THRESHOLD })
}

fn alpha_table(a_list: &[f64], xi_list: &[f64], output: Option<&Path>) -> Result<u8> {
    let mut wr = csv::Writer::from_writer(writer(output)?);
    wr.write_record(["a", "xi", "re_alpha", "im_alpha", "re_beta", "im_beta", "mode"])?;
    for &a in a_list {
        for &xi in xi_list {
            for mode in [Mode::Quadrature, Mode::Asymptotic] {
                let (al, be) = (alpha(xi, a, mode)?, beta(xi, a, mode)?);
                wr.write_record([
                    fmt_num(a),
                    fmt_num(xi),
                    fmt_num(al.re),
                    fmt_num(al.im),
                    fmt_num(be.re),
                    fmt_num(be.im),
                    mode.to_string(),
                ])?;
            }
        }
    }
    wr.flush()?;
    Ok(0)
}

fn is_numerical(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<ExperimentError>(), Some(ExperimentError::Numerical(_)))
            || matches!(c.downcast_ref::<SolverError>(), Some(SolverError::NonFinite { .. }))
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Effective { case, every } => effective(case, *every),
        Command::Decompose { checkpoint, sigma, output } => decompose_checkpoint(checkpoint, *sigma, output.as_deref()),
        Command::Validate(a) => validate(a),
        Command::Sweep { case, a0_list, min_slope } => sweep(case, a0_list, *min_slope),
        Command::AlphaTable { a, xi, output } => alpha_table(a, xi, output.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_numerical(&e) { EXIT_NUMERICAL } else { 1 })
        }
    }
}
