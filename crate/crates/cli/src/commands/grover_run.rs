//! Per-step Grover trajectories, one per seed.

use std::io::Write;

use adiagrover::grover::{optimal_iterations, GroverBackends, GroverRun, StepKind};
use adiagrover::protocols::{OracleVariant, RngStream};
use rayon::prelude::*;

use super::{anneal_for, seed_list, single_schedule, single_time, ModelKind, Problem};
use crate::config::Settings;
use crate::output::{write_csv, RunRecord};
use crate::{CliError, CliResult};

pub const EXPERIMENT: &str = "grover-run";

pub const COLUMNS: [&str; 13] = [
    "experiment",
    "n",
    "schedule",
    "total_time",
    "steps",
    "oracle",
    "diffusion",
    "seed",
    "step_index",
    "kind",
    "applied",
    "failed_oracles",
    "fidelity",
];

pub const DEFAULT_TOTAL_TIME: f64 = 20.0;

pub fn trajectories(settings: &Settings) -> CliResult<Vec<RunRecord>> {
    let problem = Problem::from_settings(settings, 4)?;
    let spec_ising = match (problem.kind, &problem.ising) {
        (ModelKind::Ising, Some(s)) => s.clone(),
        _ => return Err(CliError::Config("grover-run supports --model ising only".into())),
    };
    let oracle = settings.get_or("oracle", OracleVariant::Protocol1)?;
    let diffusion = settings.get_or("diffusion", OracleVariant::Spin1)?;
    let iterations = settings.get_or("iterations", optimal_iterations(problem.n as u32))?;
    let kind = single_schedule(settings)?;
    let t = single_time(settings, DEFAULT_TOTAL_TIME)?;
    let anneal = anneal_for(settings, kind, t, &problem.hf, oracle)?;
    let backends = GroverBackends::ising(&spec_ising, &anneal, oracle, diffusion)?;
    let seeds = seed_list(settings)?;
    let runs = seeds
        .par_iter()
        .map(|&seed| backends.run(iterations, &mut RngStream::new(seed)))
        .collect::<adiagrover::Result<Vec<GroverRun>>>()?;

    let base = RunRecord::new(EXPERIMENT)
        .param("n", problem.n)
        .param("schedule", kind)
        .param("total_time", t)
        .param("steps", anneal.steps)
        .param("oracle", oracle)
        .param("diffusion", diffusion);
    let mut rows = Vec::new();
    for run in &runs {
        let row = |index: usize, kind: &str, applied: bool, failed: usize, fidelity: f64| {
            base.clone()
                .param("seed", run.seed)
                .param("step_index", index)
                .param("kind", kind)
                .param("applied", applied)
                .param("failed_oracles", failed)
                .metric("fidelity", fidelity)
        };
        rows.push(row(0, "initial", true, 0, run.initial_fidelity));
        let mut failed = 0;
        for (i, step) in run.steps.iter().enumerate() {
            if step.kind == StepKind::Oracle && !step.applied {
                failed += 1;
            }
            rows.push(row(i + 1, step.kind.name(), step.applied, failed, step.fidelity_to_target));
        }
        rows.push(row(run.steps.len(), "final", true, failed, run.final_fidelity()));
    }
    Ok(rows)
}

pub fn run(settings: &Settings, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    write_csv(out, &COLUMNS, &trajectories(settings)?)
}
