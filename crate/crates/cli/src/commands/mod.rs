pub mod grover_run;
pub mod oracle_infidelity;
pub mod overlap_estimate;
pub mod sector_phase;

use adiagrover::evolver::AncillaModel;
use adiagrover::hamiltonians::{aklt_gap, aklt_hamiltonian, aklt_hf, ising_hf, AkltSpec, IsingSpec};
use adiagrover::operators::{HermitianOperator, StateVector};
use adiagrover::protocols::{default_anneal, OracleVariant, RngStream};
use adiagrover::schedule::{AnnealSpec, ScheduleKind};
use adiagrover::C64;
use nalgebra::DVector;

use crate::config::{parse_seeds, parse_time_grid, Settings};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Ising,
    Aklt,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ising => "ising",
            ModelKind::Aklt => "aklt",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ising" => Ok(ModelKind::Ising),
            "aklt" => Ok(ModelKind::Aklt),
            other => Err(format!("unknown model '{other}' (ising | aklt)")),
        }
    }
}

/// Problem Hamiltonian in reporting units: Ising as given, AKLT divided by
/// its unshifted gap so that `c0` is in units of the gap.
#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: ModelKind,
    pub n: usize,
    pub epsilon: f64,
    pub c0: f64,
    pub hf: HermitianOperator,
    pub ising: Option<IsingSpec>,
}

impl Problem {
    pub fn from_settings(settings: &Settings, default_n: usize) -> CliResult<Self> {
        let kind = settings.get_or("model", ModelKind::Ising)?;
        match kind {
            ModelKind::Ising => {
                let n = settings.get_or("n", default_n)?;
                let epsilon = settings.get_or("epsilon", 1.0)?;
                let spec = IsingSpec::uniform(n, epsilon)?;
                Ok(Self { kind, n, epsilon, c0: 0.0, hf: ising_hf(&spec), ising: Some(spec) })
            }
            ModelKind::Aklt => {
                let n = settings.get_or("n", 3usize)?;
                let c0 = settings.get_or("c0", -0.5)?;
                let gap = aklt_gap(&aklt_hamiltonian(n)?)?;
                let hf = aklt_hf(&AkltSpec::new(n, c0 * gap)?)?.scale(1.0 / gap);
                Ok(Self { kind, n, epsilon: 1.0, c0, hf, ising: None })
            }
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.hf.subsystem_dims().to_vec()
    }
}

pub fn schedules(settings: &Settings, default: &str) -> CliResult<Vec<ScheduleKind>> {
    let kinds: Vec<ScheduleKind> = settings.list("schedule", default)?;
    if kinds.is_empty() {
        return Err(CliError::Config("--schedule is empty".into()));
    }
    Ok(kinds)
}

pub fn single_schedule(settings: &Settings) -> CliResult<ScheduleKind> {
    match schedules(settings, "tanh")?.as_slice() {
        [k] => Ok(*k),
        _ => Err(CliError::Config("this subcommand takes a single --schedule".into())),
    }
}

pub fn single_time(settings: &Settings, default: f64) -> CliResult<f64> {
    match settings.raw("total-time") {
        None => Ok(default),
        Some(text) => match parse_time_grid(text)?.as_slice() {
            [t] => Ok(*t),
            _ => Err(CliError::Config("this subcommand takes a single --total-time".into())),
        },
    }
}

pub fn seed_list(settings: &Settings) -> CliResult<Vec<u64>> {
    match settings.raw("seeds") {
        Some(text) => parse_seeds(text),
        None => Ok(vec![settings.get_or("seed", 0u64)?]),
    }
}

/// Anneal for `variant` on `hf`, honoring a `--steps` override.
pub fn anneal_for(
    settings: &Settings,
    kind: ScheduleKind,
    total_time: f64,
    hf: &HermitianOperator,
    variant: OracleVariant,
) -> CliResult<AnnealSpec> {
    let spec = default_anneal(kind, total_time, hf, variant)?;
    Ok(match settings.get::<usize>("steps")? {
        Some(m) => spec.with_steps(m)?,
        None => spec,
    })
}

/// Anneal for a single spin-1 sector of energy `e`.
pub fn sector_anneal(settings: &Settings, kind: ScheduleKind, total_time: f64, e: f64) -> CliResult<AnnealSpec> {
    let spec = AnnealSpec::with_default_steps(kind, total_time, AncillaModel::Spin1.norm_bound(e))?;
    Ok(match settings.get::<usize>("steps")? {
        Some(m) => spec.with_steps(m)?,
        None => spec,
    })
}

/// Seeded random normalized state with independent uniform real and
/// imaginary parts.
pub fn random_state(dims: Vec<usize>, seed: u64) -> CliResult<StateVector> {
    let mut rng = RngStream::new(seed);
    let dim: usize = dims.iter().product();
    let v = DVector::from_fn(dim, |_, _| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5));
    Ok(StateVector::normalized(v, dims)?)
}
