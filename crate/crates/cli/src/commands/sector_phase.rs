//! Phase difference `arg<0_z|chi_-> - arg<0_z|chi_+>` between spin-1 sectors
//! of energy `-E` and `+E`, reported with its deviation from pi.

use std::f64::consts::PI;
use std::io::Write;

use adiagrover::evolver::{sector_overlap, wrap_phase};
use rayon::prelude::*;
use serde::Serialize;

use super::{schedules, sector_anneal};
use crate::config::{parse_time_grid, Settings};
use crate::output::write_json;
use crate::{CliError, CliResult};

pub const EXPERIMENT: &str = "sector-phase";

/// Overlap magnitudes with `|0_z>` below this mark a non-adiabatic run.
pub const OVERLAP_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub energy: f64,
    pub schedule: String,
    pub total_time: f64,
    pub steps: usize,
    pub overlap_plus: f64,
    pub overlap_minus: f64,
    pub phase_plus: Option<f64>,
    pub phase_minus: Option<f64>,
    /// `phase_minus - phase_plus` wrapped into `(-pi, pi]`.
    pub difference: Option<f64>,
    pub deviation_from_pi: Option<f64>,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseReport {
    pub experiment: &'static str,
    pub units: &'static str,
    pub rows: Vec<PhaseRow>,
}

pub fn report(settings: &Settings) -> CliResult<PhaseReport> {
    let energies: Vec<f64> = settings.list("energies", "0.5,1,2")?;
    if energies.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(CliError::Config("--energies must be positive; each E runs as the pair +E, -E".into()));
    }
    let kinds = schedules(settings, "tanh,linear")?;
    let grid = settings.raw("total-time").map(parse_time_grid).transpose()?;
    let mut points = Vec::new();
    for &e in &energies {
        for &kind in &kinds {
            // default: 50 / |E|, deep in the adiabatic regime
            let times = grid.clone().unwrap_or_else(|| vec![50.0 / e]);
            points.extend(times.into_iter().map(|t| (e, kind, t)));
        }
    }
    let rows = points
        .par_iter()
        .map(|&(e, kind, t)| {
            let spec = sector_anneal(settings, kind, t, e)?;
            let plus = sector_overlap(e, &spec)?;
            let minus = sector_overlap(-e, &spec)?;
            let ok = plus.norm() >= OVERLAP_THRESHOLD && minus.norm() >= OVERLAP_THRESHOLD;
            let difference = ok.then(|| wrap_phase(minus.arg() - plus.arg()));
            Ok(PhaseRow {
                energy: e,
                schedule: kind.to_string(),
                total_time: t,
                steps: spec.steps,
                overlap_plus: plus.norm(),
                overlap_minus: minus.norm(),
                phase_plus: ok.then(|| plus.arg()),
                phase_minus: ok.then(|| minus.arg()),
                difference,
                deviation_from_pi: difference.map(|d| wrap_phase(d - PI).abs()),
                status: if ok { "ok" } else { "breakdown" },
            })
        })
        .collect::<CliResult<Vec<PhaseRow>>>()?;
    Ok(PhaseReport { experiment: EXPERIMENT, units: "energies in epsilon; times in inverse energy units", rows })
}

/// Writes the report; any row below the overlap threshold then fails the
/// command as a numerical breakdown.
pub fn run(settings: &Settings, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let report = report(settings)?;
    write_json(out, &report)?;
    if let Some(row) = report.rows.iter().find(|r| r.status != "ok") {
        return Err(CliError::Numerical(adiagrover::Error::NonAdiabatic {
            quantity: "sector overlap with |0_z>",
            value: row.overlap_plus.min(row.overlap_minus),
        }));
    }
    Ok(())
}
