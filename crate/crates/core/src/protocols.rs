//! Oracle realizations and their exact references.
//!
//! An oracle is compiled once for a given `H_f` and schedule (eigenbasis plus
//! one ancilla propagator per distinct eigenvalue) and then applied to any
//! number of register states. Variants:
//!
//! - `Ideal`: exact sign flip of the negative-energy eigencomponent.
//! - `Spin1`: spin-1 ancilla started in `|0_x>`, projected onto `|0_z>`.
//! - `Protocol1`: two qubits started in `|+>|->`, measured in the `+-` basis;
//!   equal outcomes apply the oracle, unequal ones leave the register alone.
//! - `Protocol2`: two qubits started in `(|+-> + |-+>)/sqrt2`, ending in
//!   `(|01> + |10>)/sqrt2` and decoupled from the register.

use nalgebra::DVector;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolver::{project_ancilla, register_eigenbasis, spin1_zero_x, spin1_zero_z, AncillaModel, CompiledAnneal};
use crate::hamiltonians::{diffusion_hamiltonian, IsingSpec};
use crate::operators::{re, HermitianOperator, StateVector, C64, ONE, ZERO};
use crate::schedule::{AnnealSpec, ScheduleKind};

/// Seeded deterministic random stream (ChaCha8).
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Index drawn with probability proportional to `weights`.
    pub fn choose_weighted(&mut self, weights: &[f64]) -> Result<usize> {
        let dist = WeightedIndex::new(weights)
            .map_err(|e| Error::InvalidSpec(format!("cannot sample outcome weights {weights:?}: {e}")))?;
        Ok(dist.sample(&mut self.rng))
    }

    pub fn rng_mut(&mut self) -> &mut impl RngCore {
        &mut self.rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleVariant {
    Ideal,
    Spin1,
    Protocol1,
    Protocol2,
}

impl OracleVariant {
    pub fn name(self) -> &'static str {
        match self {
            OracleVariant::Ideal => "ideal",
            OracleVariant::Spin1 => "spin1",
            OracleVariant::Protocol1 => "p1",
            OracleVariant::Protocol2 => "p2",
        }
    }

    pub fn ancilla(self) -> Option<AncillaModel> {
        match self {
            OracleVariant::Ideal => None,
            OracleVariant::Spin1 => Some(AncillaModel::Spin1),
            OracleVariant::Protocol1 | OracleVariant::Protocol2 => Some(AncillaModel::QubitPair),
        }
    }
}

impl std::str::FromStr for OracleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ideal" => Ok(OracleVariant::Ideal),
            "spin1" => Ok(OracleVariant::Spin1),
            "p1" | "protocol1" => Ok(OracleVariant::Protocol1),
            "p2" | "protocol2" => Ok(OracleVariant::Protocol2),
            other => Err(Error::InvalidSpec(format!("unknown oracle variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for OracleVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a single-qubit measurement in the `+-` basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub register_state: StateVector,
    /// Whether the oracle acted (false only for unequal Protocol 1 outcomes).
    pub applied: bool,
    pub measurement_record: Option<(Sign, Sign)>,
    /// Ancilla state the joint state was projected onto.
    pub ancilla_final: StateVector,
    /// Weight of the joint state in the ideal final ancilla subspace; one
    /// minus this is the non-adiabatic leakage.
    pub projection_weight: f64,
}

fn plus_minus(p: Sign, q: Sign) -> StateVector {
    let s = |x: Sign| match x {
        Sign::Plus => [ONE, ONE],
        Sign::Minus => [ONE, -ONE],
    };
    let (a, b) = (s(p), s(q));
    StateVector::from_slice(&[a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]], vec![2, 2]).expect("normalizable")
}

const OUTCOMES: [(Sign, Sign); 4] =
    [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)];

/// `|+>|->`.
pub fn protocol1_ancilla() -> StateVector {
    plus_minus(Sign::Plus, Sign::Minus)
}

/// `(|+-> + |-+>)/sqrt2`.
pub fn protocol2_ancilla() -> StateVector {
    let v = plus_minus(Sign::Plus, Sign::Minus).into_amplitudes() + plus_minus(Sign::Minus, Sign::Plus).into_amplitudes();
    StateVector::normalized(v, vec![2, 2]).expect("normalizable")
}

/// `(|01> + |10>)/sqrt2`.
pub fn protocol2_target() -> StateVector {
    StateVector::from_slice(&[ZERO, ONE, ONE, ZERO], vec![2, 2]).expect("normalizable")
}

/// `(|+-> - |-+>)/sqrt2`, the singlet.
pub fn singlet() -> StateVector {
    StateVector::from_slice(&[ZERO, ONE, -ONE, ZERO], vec![2, 2]).expect("normalizable")
}

fn trivial_ancilla() -> StateVector {
    StateVector::basis(vec![1], 0).expect("one-dimensional")
}

/// Index of the single negative eigenvalue, or the count error.
fn single_negative(eigenvalues: &[f64]) -> Result<usize> {
    let negative: Vec<usize> = (0..eigenvalues.len()).filter(|&m| eigenvalues[m] < 0.0).collect();
    match negative.as_slice() {
        [m] => Ok(*m),
        _ => Err(Error::NegativeEigenvalueCount { count: negative.len() }),
    }
}

/// Eigenvector of the unique negative eigenvalue of `hf` (the marked state).
pub fn marked_state(hf: &HermitianOperator) -> Result<StateVector> {
    let (values, vectors) = register_eigenbasis(hf);
    let m = single_negative(&values)?;
    StateVector::normalized(vectors.column(m).into_owned(), hf.subsystem_dims().to_vec())
}

/// `sum_{m != w} c_m |m> - c_w |w>`.
pub fn ideal_oracle(hf: &HermitianOperator, phi: &StateVector) -> Result<StateVector> {
    let target = marked_state(hf)?;
    reflect_away(&target, phi)
}

/// `phi - 2 <t|phi> |t>`, the sign flip of the component along `t`.
pub fn reflect_away(target: &StateVector, phi: &StateVector) -> Result<StateVector> {
    let overlap = target.inner(phi)?;
    let v = phi.amplitudes() - target.amplitudes() * (overlap * re(2.0));
    StateVector::normalized(v, phi.subsystem_dims().to_vec())
}

/// `2 |s><s| phi - phi`, the reflection about `s`.
pub fn reflect_about(s: &StateVector, phi: &StateVector) -> Result<StateVector> {
    let overlap = s.inner(phi)?;
    let v = s.amplitudes() * (overlap * re(2.0)) - phi.amplitudes();
    StateVector::normalized(v, phi.subsystem_dims().to_vec())
}

#[derive(Clone, Debug)]
enum Backend {
    Ideal { target: StateVector },
    Annealed(CompiledAnneal),
}

/// Oracle for a fixed `H_f` and schedule, applicable to any register state.
#[derive(Clone, Debug)]
pub struct CompiledOracle {
    pub variant: OracleVariant,
    backend: Backend,
}

impl CompiledOracle {
    pub fn compile(hf: &HermitianOperator, variant: OracleVariant, spec: &AnnealSpec) -> Result<Self> {
        let (values, _) = register_eigenbasis(hf);
        single_negative(&values)?;
        let backend = match variant.ancilla() {
            None => Backend::Ideal { target: marked_state(hf)? },
            Some(model) => Backend::Annealed(CompiledAnneal::compile(hf, model, spec)?),
        };
        Ok(Self { variant, backend })
    }

    pub fn ideal(hf: &HermitianOperator) -> Result<Self> {
        Ok(Self { variant: OracleVariant::Ideal, backend: Backend::Ideal { target: marked_state(hf)? } })
    }

    pub fn anneal(&self) -> Option<&CompiledAnneal> {
        match &self.backend {
            Backend::Annealed(a) => Some(a),
            Backend::Ideal { .. } => None,
        }
    }

    fn initial_ancilla(&self) -> StateVector {
        match self.variant {
            OracleVariant::Ideal => trivial_ancilla(),
            OracleVariant::Spin1 => spin1_zero_x(),
            OracleVariant::Protocol1 => protocol1_ancilla(),
            OracleVariant::Protocol2 => protocol2_ancilla(),
        }
    }

    /// Joint register (x) ancilla state at the end of the anneal; `None` for
    /// the ideal variant.
    pub fn final_joint(&self, phi: &StateVector) -> Result<Option<StateVector>> {
        match &self.backend {
            Backend::Ideal { .. } => Ok(None),
            Backend::Annealed(a) => a.evolve(phi, &self.initial_ancilla()).map(Some),
        }
    }

    /// One oracle call. Only `Protocol1` draws from `rng`.
    pub fn apply(&self, phi: &StateVector, rng: &mut RngStream) -> Result<OracleOutcome> {
        let joint = match &self.backend {
            Backend::Ideal { target } => {
                return Ok(OracleOutcome {
                    register_state: reflect_away(target, phi)?,
                    applied: true,
                    measurement_record: None,
                    ancilla_final: trivial_ancilla(),
                    projection_weight: 1.0,
                })
            }
            Backend::Annealed(a) => a.evolve(phi, &self.initial_ancilla())?,
        };
        let dims = phi.subsystem_dims().to_vec();
        match self.variant {
            OracleVariant::Spin1 => {
                let zero_z = spin1_zero_z();
                let reg = project_ancilla(&joint, zero_z.amplitudes());
                let weight = reg.norm_squared();
                check_weight(weight, "ancilla weight on |0_z>")?;
                Ok(OracleOutcome {
                    register_state: StateVector::normalized(reg, dims)?,
                    applied: true,
                    measurement_record: None,
                    ancilla_final: zero_z,
                    projection_weight: weight,
                })
            }
            OracleVariant::Protocol1 => {
                let weight = antiparallel_weight(&joint);
                check_weight(weight, "ancilla weight on {|01>, |10>}")?;
                let branches: Vec<(DVector<C64>, StateVector)> = OUTCOMES
                    .iter()
                    .map(|&(p, q)| {
                        let anc = plus_minus(p, q);
                        (project_ancilla(&joint, anc.amplitudes()), anc)
                    })
                    .collect();
                let probs: Vec<f64> = branches.iter().map(|(v, _)| v.norm_squared()).collect();
                let k = rng.choose_weighted(&probs)?;
                let (p, q) = OUTCOMES[k];
                let (reg, anc) = branches.into_iter().nth(k).expect("four outcomes");
                Ok(OracleOutcome {
                    register_state: StateVector::normalized(reg, dims)?,
                    applied: p == q,
                    measurement_record: Some((p, q)),
                    ancilla_final: anc,
                    projection_weight: weight,
                })
            }
            OracleVariant::Protocol2 => {
                let bell = protocol2_target();
                let reg = project_ancilla(&joint, bell.amplitudes());
                let weight = reg.norm_squared();
                check_weight(weight, "ancilla Bell fidelity")?;
                Ok(OracleOutcome {
                    register_state: StateVector::normalized(reg, dims)?,
                    applied: true,
                    measurement_record: None,
                    ancilla_final: bell,
                    projection_weight: weight,
                })
            }
            OracleVariant::Ideal => unreachable!("handled above"),
        }
    }

    /// Protocol 1 outcome probabilities in the order `++, +-, -+, --`.
    pub fn protocol1_probabilities(&self, phi: &StateVector) -> Result<[f64; 4]> {
        let joint = self
            .final_joint(phi)?
            .ok_or_else(|| Error::InvalidSpec("ideal oracle has no ancilla".into()))?;
        let mut out = [0.0; 4];
        for (slot, &(p, q)) in out.iter_mut().zip(OUTCOMES.iter()) {
            *slot = project_ancilla(&joint, plus_minus(p, q).amplitudes()).norm_squared();
        }
        Ok(out)
    }

    /// Normalized register state and probability of the Protocol 1 outcome
    /// `(p, q)`, without sampling.
    pub fn protocol1_branch(&self, phi: &StateVector, outcome: (Sign, Sign)) -> Result<(StateVector, f64)> {
        let joint = self
            .final_joint(phi)?
            .ok_or_else(|| Error::InvalidSpec("ideal oracle has no ancilla".into()))?;
        let reg = project_ancilla(&joint, plus_minus(outcome.0, outcome.1).amplitudes());
        let p = reg.norm_squared();
        Ok((StateVector::normalized(reg, phi.subsystem_dims().to_vec())?, p))
    }

    /// Mean over the four `+-` outcomes of `1 - |<phi_k|phi_k^ideal>|^2`,
    /// where the ideal post-measurement state is the oracle output for equal
    /// outcomes and `phi` for unequal ones.
    pub fn protocol1_average_infidelity(&self, hf: &HermitianOperator, phi: &StateVector) -> Result<f64> {
        let joint = self
            .final_joint(phi)?
            .ok_or_else(|| Error::InvalidSpec("ideal oracle has no ancilla".into()))?;
        let flipped = ideal_oracle(hf, phi)?;
        let mut total = 0.0;
        for &(p, q) in OUTCOMES.iter() {
            let reg = project_ancilla(&joint, plus_minus(p, q).amplitudes());
            let state = StateVector::normalized(reg, phi.subsystem_dims().to_vec())?;
            let ideal = if p == q { &flipped } else { phi };
            total += crate::operators::infidelity(&state, ideal)?;
        }
        Ok(total / 4.0)
    }
}

/// Error figures of one oracle call, computed without the breakdown check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleDiagnostics {
    /// Register infidelity against the ideal oracle; for `Protocol1` the
    /// mean over the four measurement outcomes.
    pub infidelity: f64,
    pub projection_weight: f64,
    pub norm_drift: f64,
}

impl OracleDiagnostics {
    pub fn broke_down(&self) -> bool {
        self.projection_weight < 0.5
    }
}

impl CompiledOracle {
    pub fn diagnose(&self, hf: &HermitianOperator, phi: &StateVector) -> Result<OracleDiagnostics> {
        let Some(joint) = self.final_joint(phi)? else {
            return Ok(OracleDiagnostics { infidelity: 0.0, projection_weight: 1.0, norm_drift: 0.0 });
        };
        let norm_drift = self.anneal().map_or(0.0, CompiledAnneal::norm_drift);
        let ideal = ideal_oracle(hf, phi)?;
        let projected = |target: &StateVector| -> Result<(f64, f64)> {
            let reg = project_ancilla(&joint, target.amplitudes());
            let weight = reg.norm_squared();
            if weight == 0.0 {
                return Ok((1.0, 0.0));
            }
            let state = StateVector::normalized(reg, phi.subsystem_dims().to_vec())?;
            Ok((crate::operators::infidelity(&state, &ideal)?, weight))
        };
        let (infidelity, projection_weight) = match self.variant {
            OracleVariant::Spin1 => projected(&spin1_zero_z())?,
            OracleVariant::Protocol2 => projected(&protocol2_target())?,
            OracleVariant::Protocol1 => {
                (self.protocol1_average_infidelity(hf, phi)?, antiparallel_weight(&joint))
            }
            OracleVariant::Ideal => unreachable!("no ancilla"),
        };
        Ok(OracleDiagnostics { infidelity, projection_weight, norm_drift })
    }
}

fn check_weight(weight: f64, quantity: &'static str) -> Result<()> {
    if weight < 0.5 {
        Err(Error::NonAdiabatic { quantity, value: weight })
    } else {
        Ok(())
    }
}

/// Weight of a joint state on ancilla configurations `|01>` and `|10>`.
fn antiparallel_weight(joint: &StateVector) -> f64 {
    joint
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| matches!(i % 4, 1 | 2))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Anneal spec with the default step rule for the given oracle variant on `hf`.
pub fn default_anneal(kind: ScheduleKind, total_time: f64, hf: &HermitianOperator, variant: OracleVariant) -> Result<AnnealSpec> {
    let model = variant.ancilla().unwrap_or(AncillaModel::Spin1);
    let (values, _) = register_eigenbasis(hf);
    let e_max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    AnnealSpec::with_default_steps(kind, total_time, model.norm_bound(e_max))
}

pub fn spin1_oracle(hf: &HermitianOperator, phi: &StateVector, spec: &AnnealSpec) -> Result<OracleOutcome> {
    CompiledOracle::compile(hf, OracleVariant::Spin1, spec)?.apply(phi, &mut RngStream::new(0))
}

pub fn protocol1_oracle(
    hf: &HermitianOperator,
    phi: &StateVector,
    spec: &AnnealSpec,
    rng: &mut RngStream,
) -> Result<OracleOutcome> {
    CompiledOracle::compile(hf, OracleVariant::Protocol1, spec)?.apply(phi, rng)
}

pub fn protocol2_oracle(hf: &HermitianOperator, phi: &StateVector, spec: &AnnealSpec) -> Result<OracleOutcome> {
    CompiledOracle::compile(hf, OracleVariant::Protocol2, spec)?.apply(phi, &mut RngStream::new(0))
}

/// Diffusion step realized by running `variant` against the diffusion
/// Hamiltonian of `spec_ising`; up to a global phase the ideal action is
/// `2|s><s| - I`.
pub fn compile_diffusion(spec_ising: &IsingSpec, variant: OracleVariant, spec: &AnnealSpec) -> Result<CompiledOracle> {
    CompiledOracle::compile(&diffusion_hamiltonian(spec_ising), variant, spec)
}

pub fn annealed_diffusion(
    spec_ising: &IsingSpec,
    phi: &StateVector,
    spec: &AnnealSpec,
    variant: OracleVariant,
    rng: &mut RngStream,
) -> Result<OracleOutcome> {
    compile_diffusion(spec_ising, variant, spec)?.apply(phi, rng)
}
