//! Oracle infidelity against the exact sign flip over a total-time grid,
//! with exponential and power-law fits of the infidelity per schedule.

use std::io::Write;

use adiagrover::evolver::NORM_DRIFT_TOL;
use adiagrover::operators::StateVector;
use adiagrover::protocols::{CompiledOracle, OracleVariant};
use adiagrover::schedule::ScheduleKind;
use rayon::prelude::*;
use serde::Serialize;

use super::{anneal_for, random_state, schedules, ModelKind, Problem};
use crate::config::{parse_time_grid, Settings};
use crate::fit::{fit_exponential, fit_power_law, FitResult};
use crate::output::{write_csv, write_json, RunRecord};
use crate::CliResult;

pub const EXPERIMENT: &str = "oracle-infidelity";

pub const COLUMNS: [&str; 12] = [
    "experiment",
    "model",
    "n",
    "schedule",
    "oracle",
    "total_time",
    "duration",
    "steps",
    "infidelity",
    "projection_weight",
    "norm_drift",
    "status",
];

/// Infidelities below this are round-off and excluded from the fits, as are
/// rows whose propagators fail the unitarity check.
pub const INFIDELITY_FLOOR: f64 = 1e-13;

/// Grids on which each schedule's infidelity spans several decades above
/// the round-off floor for the default models.
pub fn default_grid(kind: ScheduleKind) -> &'static str {
    match kind {
        ScheduleKind::Tanh => "0.3:16:8",
        ScheduleKind::Linear => "10:480:8",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleFits {
    pub schedule: String,
    pub exponential: Option<FitResult>,
    pub powerlaw: Option<FitResult>,
    /// Exponential decay rate of the infidelity in total time.
    pub eta_fit: Option<f64>,
    pub excluded: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub experiment: &'static str,
    pub model: &'static str,
    pub n: usize,
    pub oracle: String,
    pub fits: Vec<ScheduleFits>,
}

pub struct Sweep {
    pub records: Vec<RunRecord>,
    pub report: FitReport,
}

fn initial_state(problem: &Problem, settings: &Settings) -> CliResult<StateVector> {
    match problem.kind {
        ModelKind::Ising => Ok(StateVector::uniform(problem.n)),
        ModelKind::Aklt => random_state(problem.dims(), settings.get_or("seed", 0u64)?),
    }
}

pub fn sweep(settings: &Settings) -> CliResult<Sweep> {
    let problem = Problem::from_settings(settings, 2)?;
    let variant = settings.get_or("oracle", OracleVariant::Spin1)?;
    let phi = initial_state(&problem, settings)?;
    let kinds = schedules(settings, "tanh,linear")?;
    let mut points = Vec::new();
    for &kind in &kinds {
        let grid = parse_time_grid(settings.raw("total-time").unwrap_or(default_grid(kind)))?;
        points.extend(grid.into_iter().map(|t| (kind, t)));
    }
    let records = points
        .par_iter()
        .map(|&(kind, t)| {
            let spec = anneal_for(settings, kind, t, &problem.hf, variant)?;
            let oracle = CompiledOracle::compile(&problem.hf, variant, &spec)?;
            let d = oracle.diagnose(&problem.hf, &phi)?;
            let status = if d.norm_drift > NORM_DRIFT_TOL {
                "norm_drift"
            } else if d.infidelity < INFIDELITY_FLOOR {
                "floor"
            } else if d.broke_down() {
                "breakdown"
            } else {
                "ok"
            };
            Ok(RunRecord::new(EXPERIMENT)
                .param("model", problem.kind.name())
                .param("n", problem.n)
                .param("schedule", kind)
                .param("oracle", variant)
                .param("epsilon", problem.epsilon)
                .param("c0", problem.c0)
                .param("status", status)
                .metric("total_time", t)
                .metric("duration", spec.duration())
                .metric("steps", spec.steps as f64)
                .metric("infidelity", d.infidelity)
                .metric("projection_weight", d.projection_weight)
                .metric("norm_drift", d.norm_drift))
        })
        .collect::<CliResult<Vec<RunRecord>>>()?;

    let fits = kinds
        .iter()
        .map(|kind| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.parameters["schedule"] == kind.name()).collect();
            // breakdown rows carry valid infidelities and stay in the fit
            let ok: Vec<&&RunRecord> =
                rows.iter().filter(|r| matches!(r.parameters["status"].as_str(), "ok" | "breakdown")).collect();
            let t: Vec<f64> = ok.iter().map(|r| r.metrics["total_time"]).collect();
            let y: Vec<f64> = ok.iter().map(|r| r.metrics["infidelity"]).collect();
            let exponential = fit_exponential(&t, &y);
            ScheduleFits {
                schedule: kind.name().to_string(),
                eta_fit: exponential.as_ref().map(|f| f.rate),
                exponential,
                powerlaw: fit_power_law(&t, &y),
                excluded: rows.len() - ok.len(),
            }
        })
        .collect();
    let report = FitReport { experiment: EXPERIMENT, model: problem.kind.name(), n: problem.n, oracle: variant.to_string(), fits };
    Ok(Sweep { records, report })
}

pub fn run(settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let sweep = sweep(settings)?;
    write_csv(out, &COLUMNS, &sweep.records)?;
    let fit_path = settings
        .raw("fit-out")
        .map(str::to_string)
        .or_else(|| settings.raw("out").map(|p| format!("{p}.fit.json")));
    match fit_path {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_json(&mut file, &sweep.report)?;
            file.flush()?;
        }
        None => write_json(err, &sweep.report)?,
    }
    Ok(())
}
