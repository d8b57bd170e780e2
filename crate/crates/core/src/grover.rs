//! Grover search driven by any oracle/diffusion backend, and overlap
//! estimation from the oscillation of the initial-state probability.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::hamiltonians::{diffusion_hamiltonian, ising_hf, IsingSpec};
use crate::operators::{HermitianOperator, StateVector};
use crate::protocols::{marked_state, reflect_about, CompiledOracle, OracleVariant, RngStream};
use crate::schedule::AnnealSpec;

/// Consecutive failed calls tolerated before giving up.
pub const RETRY_CAP: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Oracle,
    Diffusion,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::Oracle => "oracle",
            StepKind::Diffusion => "diffusion",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub kind: StepKind,
    pub applied: bool,
    pub fidelity_to_target: f64,
}

#[derive(Clone, Debug)]
pub struct GroverRun {
    pub steps: Vec<StepRecord>,
    pub iterations_requested: usize,
    pub initial_fidelity: f64,
    pub final_state: StateVector,
    pub seed: u64,
}

impl GroverRun {
    pub fn final_fidelity(&self) -> f64 {
        self.steps.last().map_or(self.initial_fidelity, |s| s.fidelity_to_target)
    }

    pub fn oracle_attempts(&self) -> usize {
        self.steps.iter().filter(|s| s.kind == StepKind::Oracle).count()
    }

    pub fn failed_oracles(&self) -> usize {
        self.steps.iter().filter(|s| s.kind == StepKind::Oracle && !s.applied).count()
    }
}

fn fidelity(target: &StateVector, psi: &StateVector) -> Result<f64> {
    Ok(target.inner(psi)?.norm_sqr().clamp(0.0, 1.0))
}

/// Compiled oracle and diffusion plus the start and target states.
#[derive(Clone, Debug)]
pub struct GroverBackends {
    pub oracle: CompiledOracle,
    pub diffusion: CompiledOracle,
    pub initial: StateVector,
    pub target: StateVector,
}

impl GroverBackends {
    /// Ising search from `|s>`: the diffusion anneals the transverse-field
    /// Hamiltonian whose single negative eigenvector is `|s>`.
    pub fn ising(
        spec: &IsingSpec,
        anneal: &AnnealSpec,
        oracle_variant: OracleVariant,
        diffusion_variant: OracleVariant,
    ) -> Result<Self> {
        let hf = ising_hf(spec);
        let dh = diffusion_hamiltonian(spec);
        Ok(Self {
            oracle: CompiledOracle::compile(&hf, oracle_variant, anneal)?,
            diffusion: CompiledOracle::compile(&dh, diffusion_variant, anneal)?,
            initial: StateVector::uniform(spec.n),
            target: marked_state(&hf)?,
        })
    }

    /// Applies `op` until it reports success, recording every attempt.
    fn step(
        &self,
        op: &CompiledOracle,
        kind: StepKind,
        psi: StateVector,
        rng: &mut RngStream,
        steps: &mut Vec<StepRecord>,
    ) -> Result<StateVector> {
        let mut psi = psi;
        for _ in 0..RETRY_CAP {
            let out = op.apply(&psi, rng)?;
            psi = out.register_state;
            steps.push(StepRecord { kind, applied: out.applied, fidelity_to_target: fidelity(&self.target, &psi)? });
            if out.applied {
                return Ok(psi);
            }
        }
        Err(Error::RetryLimit { attempts: RETRY_CAP })
    }

    pub fn run(&self, iterations: usize, rng: &mut RngStream) -> Result<GroverRun> {
        let mut psi = self.initial.clone();
        let initial_fidelity = fidelity(&self.target, &psi)?;
        let mut steps = Vec::with_capacity(2 * iterations);
        for _ in 0..iterations {
            psi = self.step(&self.oracle, StepKind::Oracle, psi, rng, &mut steps)?;
            psi = self.step(&self.diffusion, StepKind::Diffusion, psi, rng, &mut steps)?;
        }
        Ok(GroverRun { steps, iterations_requested: iterations, initial_fidelity, final_state: psi, seed: rng.seed() })
    }
}

pub fn run_grover(
    spec: &IsingSpec,
    anneal: &AnnealSpec,
    oracle_variant: OracleVariant,
    diffusion_variant: OracleVariant,
    iterations: usize,
    rng: &mut RngStream,
) -> Result<GroverRun> {
    GroverBackends::ising(spec, anneal, oracle_variant, diffusion_variant)?.run(iterations, rng)
}

/// `round(pi / (4 asin(N^-1/2)) - 1/2)` with `N = 2^n_qubits`.
pub fn optimal_iterations(n_qubits: u32) -> usize {
    let theta = (2f64.powi(n_qubits as i32)).sqrt().recip().asin();
    (FRAC_PI_4 / theta - 0.5).round().max(0.0) as usize
}

/// `(sin^2((2k+1)θ), cos^2(2kθ))` with `θ = asin(γ)`.
pub fn grover_rotation_reference(gamma: f64, k: usize) -> (f64, f64) {
    let theta = gamma.asin();
    let k = k as f64;
    (((2.0 * k + 1.0) * theta).sin().powi(2), (2.0 * k * theta).cos().powi(2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapEstimate {
    pub gamma_hat: f64,
    pub period_hat: f64,
    pub samples: Vec<(usize, f64)>,
}

/// Signals whose deviation from 1 never exceeds this are treated as flat.
const FLAT_TOL: f64 = 1e-9;
const GRID_POINTS: usize = 4000;

/// Amplitude amplification from `initial` with the given oracle and the
/// exact reflection about `initial`; fits `P_s(k) = |<initial|psi_k>|^2` to
/// `cos^2(2kθ)`. `shots` replaces exact probabilities by binomial estimates.
pub fn estimate_overlap(
    oracle: &CompiledOracle,
    initial: &StateVector,
    max_iterations: usize,
    rng: &mut RngStream,
    shots: Option<u64>,
) -> Result<OverlapEstimate> {
    if max_iterations < 2 {
        return Err(Error::InvalidSpec("overlap estimation needs at least 2 iterations".into()));
    }
    let mut psi = initial.clone();
    let mut samples = Vec::with_capacity(max_iterations + 1);
    for k in 0..=max_iterations {
        if k > 0 {
            let mut attempts = 0;
            loop {
                let out = oracle.apply(&psi, rng)?;
                psi = out.register_state;
                if out.applied {
                    break;
                }
                attempts += 1;
                if attempts >= RETRY_CAP {
                    return Err(Error::RetryLimit { attempts });
                }
            }
            psi = reflect_about(initial, &psi)?;
        }
        let p = fidelity(initial, &psi)?;
        let p = match shots {
            None => p,
            Some(n) => {
                let hits = Binomial::new(n, p)
                    .map_err(|e| Error::InvalidSpec(format!("binomial sampling with {n} shots: {e}")))?
                    .sample(rng.rng_mut());
                hits as f64 / n as f64
            }
        };
        samples.push((k, p));
    }
    let theta = fit_cos2(&samples)?;
    Ok(OverlapEstimate { gamma_hat: theta.sin(), period_hat: FRAC_PI_2 / theta, samples })
}

/// Convenience wrapper compiling the oracle for `hf`.
pub fn estimate_overlap_for(
    hf: &HermitianOperator,
    initial: &StateVector,
    variant: OracleVariant,
    anneal: &AnnealSpec,
    max_iterations: usize,
    rng: &mut RngStream,
) -> Result<OverlapEstimate> {
    let oracle = CompiledOracle::compile(hf, variant, anneal)?;
    estimate_overlap(&oracle, initial, max_iterations, rng, None)
}

fn cos2_loss(samples: &[(usize, f64)], theta: f64) -> f64 {
    samples.iter().map(|&(k, p)| (p - (2.0 * k as f64 * theta).cos().powi(2)).powi(2)).sum()
}

/// Least-squares `θ ∈ (0, π/4]` for `cos^2(2kθ)`: grid scan, then
/// golden-section refinement around the best grid point.
pub fn fit_cos2(samples: &[(usize, f64)]) -> Result<f64> {
    if samples.iter().all(|&(_, p)| (1.0 - p).abs() < FLAT_TOL) {
        return Err(Error::NoOverlap);
    }
    let h = FRAC_PI_4 / GRID_POINTS as f64;
    let best = (1..=GRID_POINTS)
        .map(|i| (i, cos2_loss(samples, i as f64 * h)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let (mut lo, mut hi) = ((best - 1) as f64 * h, ((best + 1) as f64 * h).min(FRAC_PI_4));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (cos2_loss(samples, x1), cos2_loss(samples, x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = cos2_loss(samples, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = cos2_loss(samples, x2);
        }
    }
    let theta = 0.5 * (lo + hi);
    if theta <= h * 0.5 {
        return Err(Error::NoOverlap);
    }
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ScheduleKind;
    use approx::assert_abs_diff_eq;

    fn ideal_run(n: usize, iterations: usize) -> GroverRun {
        let spec = IsingSpec::uniform(n, 1.0).unwrap();
        let anneal = AnnealSpec::tanh(1.0, 100).unwrap();
        run_grover(&spec, &anneal, OracleVariant::Ideal, OracleVariant::Ideal, iterations, &mut RngStream::new(0)).unwrap()
    }

    #[test]
    fn n2_one_iteration_exact() {
        assert_abs_diff_eq!(ideal_run(2, 1).final_fidelity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn n4_three_iterations() {
        let expected = (7.0 * 0.25f64.asin()).sin().powi(2);
        let run = ideal_run(4, 3);
        assert_abs_diff_eq!(run.final_fidelity(), expected, epsilon = 1e-12);
        assert!((run.final_fidelity() - 0.961).abs() < 1e-3);
        assert_eq!(run.steps.len(), 6);
        let kinds: Vec<StepKind> = run.steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, [StepKind::Oracle, StepKind::Diffusion].repeat(3));
    }

    #[test]
    fn ideal_runs_follow_rotation_reference() {
        for n in 1..=5 {
            let gamma = (2f64.powi(n as i32)).sqrt().recip();
            let run = ideal_run(n, 6);
            assert_abs_diff_eq!(run.initial_fidelity, gamma * gamma, epsilon = 1e-12);
            for k in 1..=6 {
                let (p, _) = grover_rotation_reference(gamma, k);
                assert_abs_diff_eq!(run.steps[2 * k - 1].fidelity_to_target, p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn optimal_iteration_counts() {
        assert_eq!(optimal_iterations(2), 1);
        assert_eq!(optimal_iterations(4), 3);
        assert_eq!(optimal_iterations(10), 25);
    }

    #[test]
    fn optimal_iterations_brute_force() {
        for n in 2..=14u32 {
            let theta = (2f64.powi(n as i32)).sqrt().recip().asin();
            // first peak lies before k = pi / (4θ)
            let horizon = (FRAC_PI_4 / theta).ceil() as usize;
            let mut brute = 0;
            for k in 1..=horizon {
                let p = |k: usize| ((2 * k + 1) as f64 * theta).sin().powi(2);
                if p(k) > p(brute) {
                    brute = k;
                }
            }
            assert_eq!(optimal_iterations(n), brute, "n = {n}");
        }
    }

    #[test]
    fn rotation_reference_examples() {
        assert_abs_diff_eq!(grover_rotation_reference(0.5, 1).0, 1.0, epsilon = 1e-15);
        assert!((grover_rotation_reference(0.25, 3).0 - 0.961).abs() < 1e-3);
        assert_eq!(grover_rotation_reference(0.3, 0).1, 1.0);
    }

    #[test]
    fn overlap_uniform_n4() {
        let hf = ising_hf(&IsingSpec::uniform(4, 1.0).unwrap());
        let oracle = CompiledOracle::ideal(&hf).unwrap();
        let est = estimate_overlap(&oracle, &StateVector::uniform(4), 12, &mut RngStream::new(0), None).unwrap();
        assert_eq!(est.samples[0], (0, 1.0));
        assert_abs_diff_eq!(est.gamma_hat, 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(est.period_hat, FRAC_PI_2 / 0.25f64.asin(), epsilon = 1e-7);
    }

    #[test]
    fn flat_signal_rejected() {
        let samples: Vec<(usize, f64)> = (0..10).map(|k| (k, 1.0)).collect();
        assert_eq!(fit_cos2(&samples).unwrap_err(), Error::NoOverlap);
        // initial state orthogonal to the target
        let hf = ising_hf(&IsingSpec::uniform(2, 1.0).unwrap());
        let oracle = CompiledOracle::ideal(&hf).unwrap();
        let start = StateVector::basis(vec![2, 2], 0).unwrap();
        let err = estimate_overlap(&oracle, &start, 8, &mut RngStream::new(0), None).unwrap_err();
        assert_eq!(err, Error::NoOverlap);
    }

    #[test]
    fn protocol1_run_retries_and_converges() {
        let spec = IsingSpec::uniform(2, 1.0).unwrap();
        let hf = ising_hf(&spec);
        let anneal = crate::protocols::default_anneal(ScheduleKind::Tanh, 10.0, &hf, OracleVariant::Protocol1).unwrap();
        let backends = GroverBackends::ising(&spec, &anneal, OracleVariant::Protocol1, OracleVariant::Spin1).unwrap();
        let mut saw_failure = false;
        for seed in 0..8 {
            let run = backends.run(1, &mut RngStream::new(seed)).unwrap();
            assert!(run.final_fidelity() > 1.0 - 1e-3);
            assert_eq!(run.steps.iter().filter(|s| s.applied).count(), 2);
            for w in run.steps.windows(2) {
                if !w[0].applied {
                    assert_eq!(w[1].kind, StepKind::Oracle);
                    saw_failure = true;
                }
            }
        }
        assert!(saw_failure);
    }
}
