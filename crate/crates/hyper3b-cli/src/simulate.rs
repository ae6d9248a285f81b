use crate::config::Config;
use crate::output::{csv_text, emit, fmt_f64, to_json, usage, UsageError};
use anyhow::{Context, Result};
use hyper3b::dynamics::{
    focal_conic_fit, integrate, kepler_psi_dot, observables, p_lambda_deforming, DynEvent,
    DynState, Model, StepStats,
};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// Free motion, all six coordinates.
    Free,
    /// Free motion in a fixed plane.
    Planar,
    /// Planar free motion without rotation (p_phi1 = 0).
    Deforming,
    /// Harmonic binding to the equilateral shape of size rho0.
    Harmonic,
    /// Equilateral Newtonian motion.
    Kepler,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// Initial state as JSON with fields a, lambda, phi1, theta, phi2, rho
    /// and their rates da, dlambda, dphi1, dtheta, dphi2, drho.
    #[arg(long)]
    pub init: PathBuf,
    #[arg(long = "t-end")]
    pub t_end: f64,
    /// Integrator tolerance (mixed absolute and relative).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Trajectory CSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of sampling intervals.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Equilibrium hyperradius of the harmonic scenario.
    #[arg(long, allow_negative_numbers = true)]
    pub rho0: Option<f64>,
    /// Report JSON output (stdout when omitted).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Report {
    scenario: &'static str,
    model: Model,
    chart: &'static str,
    t_end: f64,
    tol: f64,
    samples: usize,
    completed: bool,
    event: Option<DynEvent>,
    stats: StepStats,
    energy_initial: f64,
    energy_drift: f64,
    angular_momentum_initial: f64,
    angular_momentum_drift: f64,
    omega_initial: f64,
    omega_drift: f64,
    radius_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_lambda_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_momentum_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conic_residual: Option<f64>,
}

pub const COLUMNS: [&str; 16] = [
    "t",
    "a",
    "lambda",
    "phi1",
    "theta",
    "phi2",
    "rho",
    "da",
    "dlambda",
    "dphi1",
    "dtheta",
    "dphi2",
    "drho",
    "energy",
    "|L|",
    "omega_classical",
];

fn max_dev(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| (v - values[0]).abs())
        .fold(0.0, f64::max)
}

pub fn run(args: &Args, cfg: &Config) -> Result<u8> {
    let text = std::fs::read_to_string(&args.init)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", args.init.display())))?;
    let s0: DynState = serde_json::from_str(&text).map_err(|e| {
        UsageError(format!(
            "invalid initial state {}: {e}",
            args.init.display()
        ))
    })?;
    if !s0.to_array().iter().all(|x| x.is_finite()) {
        return usage("initial state must be finite");
    }
    if !(args.t_end >= 0.0 && args.t_end.is_finite()) {
        return usage(format!(
            "--t-end must be finite and non-negative, got {}",
            args.t_end
        ));
    }
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-10);
    if !(tol > 0.0 && tol.is_finite()) {
        return usage(format!("--tol must be positive, got {tol}"));
    }
    let samples = args.samples.or(cfg.samples).unwrap_or(1000);
    if samples == 0 {
        return usage("--samples must be at least 1");
    }
    let rho0 = args.rho0.or(cfg.rho0).unwrap_or(1.0);
    let (model, name) = match args.scenario {
        Scenario::Free => (Model::free(), "free"),
        Scenario::Planar => (Model::planar(), "planar"),
        Scenario::Deforming => (Model::deforming(), "deforming"),
        Scenario::Harmonic => (Model::harmonic(rho0), "harmonic"),
        Scenario::Kepler => (Model::kepler(), "kepler"),
    };
    let traj = integrate(&s0, &model, args.t_end, tol, samples)
        .map_err(|e| UsageError(format!("cannot start {name} integration: {e}")))?;
    let mut rows = Vec::with_capacity(traj.samples.len());
    let (mut energy, mut ang, mut omega, mut rho) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut p_lambda, mut psi_mom, mut polar) = (Vec::new(), Vec::new(), Vec::new());
    for (t, st) in &traj.samples {
        let o =
            observables(st, &model.potential).with_context(|| format!("observables at t = {t}"))?;
        let mut row = vec![fmt_f64(*t)];
        row.extend(st.to_array().iter().map(|x| fmt_f64(*x)));
        row.extend([
            fmt_f64(o.energy),
            fmt_f64(o.angular_momentum_norm()),
            fmt_f64(o.omega),
        ]);
        rows.push(row);
        energy.push(o.energy);
        ang.push(o.angular_momentum_norm());
        omega.push(o.omega);
        rho.push(st.rho);
        p_lambda.push(p_lambda_deforming(st));
        psi_mom.push(st.rho * st.rho * kepler_psi_dot(st));
        polar.push((st.rho, st.phi1 + 0.5 * st.lambda));
    }
    std::fs::write(&args.out, csv_text(&COLUMNS, rows)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let kepler = args.scenario == Scenario::Kepler;
    let report = Report {
        scenario: name,
        model,
        chart: model.chart(),
        t_end: args.t_end,
        tol,
        samples: traj.samples.len(),
        completed: traj.event.is_none(),
        event: traj.event.clone(),
        stats: traj.stats,
        energy_initial: energy[0],
        energy_drift: max_dev(&energy),
        angular_momentum_initial: ang[0],
        angular_momentum_drift: max_dev(&ang),
        omega_initial: omega[0],
        omega_drift: max_dev(&omega),
        radius_drift: max_dev(&rho),
        p_lambda_drift: (args.scenario == Scenario::Deforming).then(|| max_dev(&p_lambda)),
        psi_momentum_drift: kepler.then(|| max_dev(&psi_mom)),
        conic_residual: if kepler {
            focal_conic_fit(&polar).map(|(_, r)| r)
        } else {
            None
        },
    };
    emit(&to_json(&report)?, args.report.as_deref())?;
    if let Some(ev) = &traj.event {
        eprintln!("integration stopped early: {ev:?}");
        return Ok(1);
    }
    Ok(0)
}
