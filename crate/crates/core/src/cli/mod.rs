//! Command-line surface: `simulate`, `geometry`, `quantize`, `verify`.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::curvegeo::{
    bounds_check, curvature_energy_check, phase_plane_area, BoundsVerdict, Curve, GeometryReport,
};
use crate::hamexpr::{ComplexScalar, EvalError};
use crate::odeint::{
    integrate_adaptive, integrate_adaptive_at, integrate_rk4, linspace, resample, AdaptiveOptions,
    IntegrateError, Trajectory,
};
use crate::quantop::{commutator, dual_operators, scenario_commutators, Bracket, QuantError};
use crate::verify::{self, VerifyOptions};
use config::{ConfigLayer, CurveName, MethodName, Resolved, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("integration failure: {0}")]
    Integration(#[from] IntegrateError),
    #[error("evaluation failure: {0}")]
    Eval(#[from] EvalError),
    #[error("not quantizable: {0}")]
    Nonlinear(String),
    #[error("verification failed: {failed} of {total} criteria")]
    Verification { failed: usize, total: usize },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Integration(_) | CliError::Eval(_) => 3,
            CliError::Nonlinear(_) => 4,
            CliError::Verification { .. } => 5,
        }
    }
}

impl From<crate::curvegeo::GeoError> for CliError {
    fn from(e: crate::curvegeo::GeoError) -> Self {
        match e {
            crate::curvegeo::GeoError::Eval(e) => CliError::Eval(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<QuantError> for CliError {
    fn from(e: QuantError) -> Self {
        match e {
            QuantError::Nonlinear { .. }
            | QuantError::NonlinearFlow(_)
            | QuantError::TimeDependent(_) => CliError::Nonlinear(e.to_string()),
            QuantError::Eval(e) => CliError::Eval(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cxmech",
    version,
    about = "Complexified Hamiltonian mechanics toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a flow and write its trajectory as CSV.
    Simulate(RunArgs),
    /// Curvature, length, area and bounds of the phase-space curve.
    Geometry(RunArgs),
    /// Commutator report for a quadratic Hamiltonian.
    Quantize(RunArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// TOML (or .json) config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// harmonic, imaginary or attenuated.
    #[arg(long, conflicts_with = "hamiltonian")]
    pub scenario: Option<String>,
    /// Inline Hamiltonian, e.g. "p^2/2 + q^2/2 + i*0.05*p^2".
    #[arg(long)]
    pub hamiltonian: Option<String>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    #[arg(long, allow_negative_numbers = true)]
    pub q0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Fixed RK4 step.
    #[arg(long, conflicts_with = "steps")]
    pub step: Option<f64>,
    /// Number of fixed RK4 steps over the span.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_step: Option<f64>,
    /// Resample onto this many uniform intervals.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub curve: Option<CurveArg>,
    /// Trajectory CSV path (simulate defaults to stdout).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum MethodArg {
    Rk4,
    Adaptive,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum CurveArg {
    Z,
    Zdh,
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// Run a single criterion group.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Test fixture: flip the sign of the symplectic product.
    #[arg(long, hide = true)]
    pub inject_omega_sign_flip: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl RunArgs {
    fn layer(&self) -> Result<ConfigLayer, CliError> {
        let base = match &self.config {
            Some(p) => ConfigLayer::from_file(p)?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            scenario: self.scenario.clone(),
            hamiltonian: self.hamiltonian.clone(),
            params: self.params.iter().cloned().collect(),
            q0: self.q0,
            p0: self.p0,
            t0: self.t0,
            t_end: self.t_end,
            method: self.method.map(|m| match m {
                MethodArg::Rk4 => MethodName::Rk4,
                MethodArg::Adaptive => MethodName::Adaptive,
            }),
            step: self.step,
            steps: self.steps,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            samples: self.samples,
            curve: self.curve.map(|c| match c {
                CurveArg::Z => CurveName::Z,
                CurveArg::Zdh => CurveName::Zdh,
            }),
            csv: self.csv.clone(),
            report: self.report.clone(),
        };
        // a flag-level scenario or Hamiltonian replaces the file's choice
        let mut base = base;
        if flags.scenario.is_some() {
            base.hamiltonian = None;
        }
        if flags.hamiltonian.is_some() {
            base.scenario = None;
        }
        Ok(base.overlay(flags))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        config::resolve(self.layer()?)
    }
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn envelope<'a, T: Serialize>(
    command: &'static str,
    config: &'a RunConfig,
    body: T,
) -> Envelope<'a, T> {
    Envelope {
        schema: 1,
        version: VERSION,
        command,
        config,
        body,
    }
}

/// Integrates the resolved run, resampling when requested.
pub fn trajectory(run: &Resolved) -> Result<Trajectory, CliError> {
    let c = &run.config;
    let s0 = run.initial();
    let tr = match c.method {
        MethodName::Rk4 => {
            let steps = c.steps.unwrap_or(config::DEFAULT_RK4_STEPS);
            integrate_rk4(&run.flow, s0, c.step.unwrap_or(0.0), steps)?
        }
        MethodName::Adaptive => {
            let mut opts = AdaptiveOptions::new(
                c.rel_tol.unwrap_or(config::DEFAULT_REL_TOL),
                c.abs_tol.unwrap_or(config::DEFAULT_ABS_TOL),
            );
            if let Some(h) = c.max_step {
                opts = opts.with_max_step(h);
            }
            match c.samples {
                Some(n) if n > 0 && c.t_end > c.t0 => {
                    return Ok(integrate_adaptive_at(
                        &run.flow,
                        s0,
                        &linspace(c.t0, c.t_end, n),
                        opts,
                    )?)
                }
                _ => integrate_adaptive(&run.flow, s0, c.t_end, opts)?,
            }
        }
    };
    match c.samples {
        Some(n) if n > 0 && c.t_end > c.t0 => {
            Ok(resample(&run.flow, &tr, &linspace(c.t0, c.t_end, n))?)
        }
        _ => Ok(tr),
    }
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    rows: usize,
    non_finite_rows: usize,
    rejected_steps: usize,
    t_final: f64,
    q_final: f64,
    p_final: f64,
    energy_initial: f64,
    energy_final: f64,
    max_relative_energy_drift: f64,
    csv: Option<PathBuf>,
}

pub fn cmd_simulate<W: Write, E: Write>(
    args: &RunArgs,
    out: &mut W,
    err: &mut E,
) -> Result<(), CliError> {
    let run = args.resolve()?;
    let tr = trajectory(&run)?;
    let curve = run.config.curve.curve();
    match &run.config.csv {
        Some(p) => output::write_csv_file(p, &run.flow, &tr, curve)?,
        None => output::write_csv(out, &run.flow, &tr, curve)?,
    }
    let energies = tr
        .samples()
        .iter()
        .map(|s| run.flow.value(&s.state).map(|v| v.re))
        .collect::<Result<Vec<_>, _>>()?;
    let e0 = energies[0];
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    let last = tr.last().state;
    let summary = SimulateSummary {
        rows: tr.len(),
        non_finite_rows: tr.samples().iter().filter(|s| !s.state.is_finite()).count(),
        rejected_steps: tr.rejected_steps(),
        t_final: last.t,
        q_final: last.q,
        p_final: last.p,
        energy_initial: e0,
        energy_final: *energies.last().unwrap(),
        max_relative_energy_drift: energies
            .iter()
            .map(|e| (e - e0).abs() / scale)
            .fold(0.0, f64::max),
        csv: run.config.csv.clone(),
    };
    output::write_json(
        &envelope("simulate", &run.config, summary),
        run.config.report.as_deref(),
        err,
    )
}

#[derive(Debug, Serialize)]
pub struct GeometrySummary {
    pub curve: Curve,
    pub samples: usize,
    pub singular_samples: usize,
    pub arc_length: f64,
    pub closed: bool,
    pub closure_gap: f64,
    /// Area enclosed in the z plane.
    pub area: Option<f64>,
    /// The same area measured in the (q, p) plane.
    pub area_phase_plane: Option<f64>,
    pub area_note: Option<String>,
    pub period: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub max_abs_kappa: Option<f64>,
    /// `Ω(ż_dH, z̈_dH)/(κ₀ω²)` at the initial state.
    pub energy: Option<f64>,
    /// `Re ℋ` at the initial state.
    pub hamiltonian_value: f64,
    /// Phase-plane area over period.
    pub energy_from_area: Option<f64>,
    pub bounds: Option<BoundsVerdict>,
    pub bounds_note: Option<String>,
    /// Largest relative residual of `κ = κ₀E/|ż_dH|³` over the samples.
    pub curvature_energy_residual: Option<f64>,
}

pub fn geometry_summary(run: &Resolved, tr: &Trajectory) -> Result<GeometrySummary, CliError> {
    let rep = GeometryReport::build(&run.flow, tr, run.config.curve.curve(), run.period())?;
    let (bounds, bounds_note) = match bounds_check(&rep) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let k0 = run.flow.params().kappa0();
    let area_qp = rep.area.map(|a| phase_plane_area(a, k0));
    let residual = rep.energy.and_then(|e| {
        tr.samples()
            .iter()
            .map(|s| curvature_energy_check(&run.flow, &s.state, e).ok())
            .try_fold(0.0f64, |acc, x| x.map(|x| acc.max(x)))
    });
    Ok(GeometrySummary {
        curve: rep.curve,
        samples: rep.samples.len(),
        singular_samples: rep.singular_samples,
        arc_length: rep.arc_length,
        closed: rep.closed,
        closure_gap: rep.closure_gap,
        area: rep.area,
        area_phase_plane: area_qp,
        area_note: rep.area_note.clone(),
        period: rep.period,
        kappa_min: rep.kappa_min,
        kappa_max: rep.kappa_max,
        max_abs_kappa: rep
            .samples
            .iter()
            .filter_map(|s| s.kappa)
            .map(f64::abs)
            .reduce(f64::max),
        energy: rep.energy,
        hamiltonian_value: run.flow.value(&tr.first().state)?.re,
        energy_from_area: match (area_qp, rep.period) {
            (Some(a), Some(t)) if t > 0.0 => Some(a / t),
            _ => None,
        },
        bounds,
        bounds_note,
        curvature_energy_residual: residual,
    })
}

pub fn cmd_geometry<W: Write>(args: &RunArgs, out: &mut W) -> Result<(), CliError> {
    let run = args.resolve()?;
    let tr = trajectory(&run)?;
    if let Some(p) = &run.config.csv {
        output::write_csv_file(p, &run.flow, &tr, run.config.curve.curve())?;
    }
    let summary = geometry_summary(&run, &tr)?;
    output::write_json(
        &envelope("geometry", &run.config, summary),
        run.config.report.as_deref(),
        out,
    )
}

#[derive(Debug, Serialize)]
struct EngineEntry {
    label: &'static str,
    engine: ComplexScalar,
}

pub fn cmd_quantize<W: Write>(args: &RunArgs, out: &mut W) -> Result<(), CliError> {
    let run = args.resolve()?;
    let path = run.config.report.as_deref();
    match &run.scenario {
        Some(sc) => {
            let rep = scenario_commutators(sc)?;
            output::write_json(&envelope("quantize", &run.config, rep), path, out)
        }
        None => {
            let ops = dual_operators(&run.flow)?;
            let hbar = run.flow.params().hbar();
            let entries: Vec<EngineEntry> = Bracket::ALL
                .iter()
                .map(|b| {
                    let (a, c) = b.operands(&ops);
                    EngineEntry {
                        label: b.label(),
                        engine: commutator(a, c, hbar),
                    }
                })
                .collect();
            #[derive(Serialize)]
            struct Body {
                operators: crate::quantop::DualOperators,
                entries: Vec<EngineEntry>,
            }
            output::write_json(
                &envelope(
                    "quantize",
                    &run.config,
                    Body {
                        operators: ops,
                        entries,
                    },
                ),
                path,
                out,
            )
        }
    }
}

pub fn cmd_verify<W: Write>(args: &VerifyArgs, out: &mut W) -> Result<(), CliError> {
    let mut opts = VerifyOptions {
        seed: args.seed,
        ..VerifyOptions::default()
    };
    if args.inject_omega_sign_flip {
        opts.omega = verify::flipped_omega;
    }
    let report = verify::run(args.only.as_deref(), &opts).map_err(CliError::Config)?;
    let io = |e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    for c in &report.criteria {
        writeln!(out, "{}", c.summary_line()).map_err(io)?;
        for n in &c.notes {
            writeln!(out, "    note: {n}").map_err(io)?;
        }
    }
    let summary = serde_json::json!({
        "schema": 1,
        "version": VERSION,
        "seed": report.seed,
        "passed": report.passed,
        "failed": report.failed,
    });
    writeln!(out, "summary: {summary}").map_err(io)?;
    if let Some(p) = &args.report {
        output::write_json(&report, Some(p), out)?;
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Verification {
            failed: report.failed,
            total: report.criteria.len(),
        })
    }
}

/// Dispatches a parsed command line.
pub fn run<W: Write, E: Write>(cli: &Cli, out: &mut W, err: &mut E) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::Geometry(a) => cmd_geometry(a, out),
        Command::Quantize(a) => cmd_quantize(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}
