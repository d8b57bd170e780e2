//! Overlap `|<initial|target>|` estimated from the period of the
//! initial-state probability under amplitude amplification.

use std::io::Write;

use adiagrover::grover::estimate_overlap;
use adiagrover::operators::StateVector;
use adiagrover::protocols::{marked_state, CompiledOracle, OracleVariant, RngStream};
use adiagrover::C64;
use nalgebra::DVector;
use serde::Serialize;

use super::{anneal_for, random_state, single_schedule, single_time, Problem};
use crate::config::Settings;
use crate::output::write_json;
use crate::{CliError, CliResult};

pub const EXPERIMENT: &str = "overlap-estimate";

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub k: usize,
    pub p_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub experiment: &'static str,
    pub model: &'static str,
    pub n: usize,
    pub oracle: String,
    pub initial: String,
    pub seed: u64,
    pub shots: Option<u64>,
    pub gamma_hat: f64,
    pub period_hat: f64,
    /// `|<initial|target>|` computed directly, for comparison.
    pub gamma_direct: f64,
    pub samples: Vec<Sample>,
}

/// Amplitudes from a text file: one `re [im]` pair per line, `#` comments.
pub fn read_amplitudes(path: &str, dims: Vec<usize>) -> CliResult<StateVector> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    let mut amps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Config(format!("{path}:{}: {e}", lineno + 1)))?;
        match nums.as_slice() {
            [re] => amps.push(C64::new(*re, 0.0)),
            [re, im] => amps.push(C64::new(*re, *im)),
            _ => return Err(CliError::Config(format!("{path}:{}: expected 're' or 're im'", lineno + 1))),
        }
    }
    let dim: usize = dims.iter().product();
    if amps.len() != dim {
        return Err(CliError::Config(format!("{path}: {} amplitudes for a register of dimension {dim}", amps.len())));
    }
    Ok(StateVector::normalized(DVector::from_vec(amps), dims)?)
}

pub fn report(settings: &Settings) -> CliResult<OverlapReport> {
    let problem = Problem::from_settings(settings, 4)?;
    let seed = settings.get_or("seed", 0u64)?;
    let initial_kind = settings.raw("initial").unwrap_or("uniform").to_string();
    let dims = problem.dims();
    let dim: usize = dims.iter().product();
    let initial = match initial_kind.as_str() {
        "uniform" => StateVector::normalized(DVector::from_element(dim, C64::new(1.0, 0.0)), dims)?,
        "random" => random_state(dims, seed)?,
        path => read_amplitudes(path, dims)?,
    };
    let variant = settings.get_or("oracle", OracleVariant::Ideal)?;
    let oracle = match variant {
        OracleVariant::Ideal => CompiledOracle::ideal(&problem.hf)?,
        _ => {
            let kind = single_schedule(settings)?;
            let t = single_time(settings, 20.0)?;
            CompiledOracle::compile(&problem.hf, variant, &anneal_for(settings, kind, t, &problem.hf, variant)?)?
        }
    };
    let default_iterations = 4 * (dim as f64).sqrt().ceil() as usize + 8;
    let iterations = settings.get_or("iterations", default_iterations)?;
    let shots = settings.get::<u64>("sampled")?;
    if shots == Some(0) {
        return Err(CliError::Config("--sampled needs at least one shot".into()));
    }
    let mut rng = RngStream::new(seed);
    let est = estimate_overlap(&oracle, &initial, iterations, &mut rng, shots)?;
    let gamma_direct = marked_state(&problem.hf)?.inner(&initial)?.norm();
    Ok(OverlapReport {
        experiment: EXPERIMENT,
        model: problem.kind.name(),
        n: problem.n,
        oracle: variant.to_string(),
        initial: initial_kind,
        seed,
        shots,
        gamma_hat: est.gamma_hat,
        period_hat: est.period_hat,
        gamma_direct,
        samples: est.samples.into_iter().map(|(k, p_s)| Sample { k, p_s }).collect(),
    })
}

pub fn run(settings: &Settings, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    write_json(out, &report(settings)?)
}
