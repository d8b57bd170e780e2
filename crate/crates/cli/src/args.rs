use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "adiagrover", version, about = "Adiabatic Grover oracle experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oracle infidelity versus total time, with exponential and power-law fits.
    OracleInfidelity(Flags),
    /// Full Grover search trajectories, one per seed.
    GroverRun(Flags),
    /// Phase difference between opposite-energy spin-1 sectors.
    SectorPhase(Flags),
    /// Overlap with the target estimated from amplitude-amplification oscillations.
    OverlapEstimate(Flags),
}

/// Flags shared by all subcommands; each uses the subset it needs. Values
/// are kept as text and parsed after merging with the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key = value file; command-line flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ising | aklt
    #[arg(long)]
    pub model: Option<String>,
    /// tanh | linear, or a comma list
    #[arg(long)]
    pub schedule: Option<String>,
    /// single value, comma list, or start:stop:points-per-decade
    #[arg(long = "total-time")]
    pub total_time: Option<String>,
    /// integrator steps per anneal (default: max(1000, 40 * duration * |H|))
    #[arg(long)]
    pub steps: Option<String>,
    /// qubits (ising) or sites (aklt)
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// AKLT chemical potential in units of the gap (default -0.5)
    #[arg(long)]
    pub c0: Option<String>,
    /// ideal | spin1 | p1 | p2
    #[arg(long)]
    pub oracle: Option<String>,
    /// diffusion backend for grover-run: ideal | spin1 | p1 | p2
    #[arg(long)]
    pub diffusion: Option<String>,
    /// Grover rounds (grover-run) or maximum iterations (overlap-estimate)
    #[arg(long)]
    pub iterations: Option<String>,
    /// sector energies for sector-phase, comma list
    #[arg(long)]
    pub energies: Option<String>,
    /// overlap-estimate start state: uniform | random | path to amplitudes
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// comma list or half-open range a..b
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// where oracle-infidelity writes its fit JSON (default: <out>.fit.json, else stderr)
    #[arg(long = "fit-out")]
    pub fit_out: Option<String>,
    /// shots per point for overlap-estimate (default: exact probabilities)
    #[arg(long)]
    pub sampled: Option<String>,
    /// worker threads (0 = all cores)
    #[arg(long)]
    pub threads: Option<String>,
}

impl Flags {
    pub fn entries(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("model", self.model.as_ref()),
            ("schedule", self.schedule.as_ref()),
            ("total-time", self.total_time.as_ref()),
            ("steps", self.steps.as_ref()),
            ("n", self.n.as_ref()),
            ("epsilon", self.epsilon.as_ref()),
            ("c0", self.c0.as_ref()),
            ("oracle", self.oracle.as_ref()),
            ("diffusion", self.diffusion.as_ref()),
            ("iterations", self.iterations.as_ref()),
            ("energies", self.energies.as_ref()),
            ("initial", self.initial.as_ref()),
            ("seed", self.seed.as_ref()),
            ("seeds", self.seeds.as_ref()),
            ("out", self.out.as_ref()),
            ("fit-out", self.fit_out.as_ref()),
            ("sampled", self.sampled.as_ref()),
            ("threads", self.threads.as_ref()),
        ]
    }

    pub fn known_keys() -> Vec<&'static str> {
        Flags::default().entries().into_iter().map(|(k, _)| k).collect()
    }
}
