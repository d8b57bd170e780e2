//! Time evolution under a scheduled Hamiltonian.
//!
//! Both paths use the same stepper: `M` piecewise-constant steps, the
//! Hamiltonian evaluated at each interval midpoint and exponentiated exactly
//! through its eigendecomposition. The full-space path works on the joint
//! register+ancilla space; the sector path uses the block structure of
//! `A(t) H_f (x) G_z + B(t) I (x) G_x` in the eigenbasis of `H_f` and only
//! ever exponentiates the small ancilla generator, once per distinct
//! eigenvalue.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::DEGENERACY_TOL;
use crate::operators::{eigh, pauli, re, spin1, Axis, HermitianOperator, StateVector, C64, ONE, ZERO};
use crate::schedule::AnnealSpec;

pub use crate::operators::infidelity;

/// Largest tolerated deviation of the final norm from one.
pub const NORM_DRIFT_TOL: f64 = 1e-9;
/// Sector energies with smaller magnitude are rejected.
pub const ZERO_ENERGY_TOL: f64 = 1e-9;

/// Ancilla attached to the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaModel {
    /// Spin-1 with generators `S_z`, `S_x`.
    Spin1,
    /// One spin-1/2 with generators `sigma_z`, `sigma_x`.
    Qubit,
    /// Two spin-1/2 with generators `sz_a + sz_b`, `sx_a + sx_b`.
    QubitPair,
}

impl AncillaModel {
    pub fn dim(self) -> usize {
        match self {
            AncillaModel::Spin1 => 3,
            AncillaModel::Qubit => 2,
            AncillaModel::QubitPair => 4,
        }
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            3 => Ok(AncillaModel::Spin1),
            2 => Ok(AncillaModel::Qubit),
            4 => Ok(AncillaModel::QubitPair),
            other => Err(Error::UnsupportedAncilla(other)),
        }
    }

    /// Spectral norms of the two generators.
    fn generator_norms(self) -> (f64, f64) {
        match self {
            AncillaModel::Spin1 | AncillaModel::Qubit => (1.0, 1.0),
            AncillaModel::QubitPair => (2.0, 2.0),
        }
    }

    /// Bound on `max_t ||a E G_z + b G_x||` over a spectrum with largest
    /// magnitude `e_max`.
    pub fn norm_bound(self, e_max: f64) -> f64 {
        let (nz, nx) = self.generator_norms();
        e_max.abs() * nz + nx
    }
}

/// Single-factor generators; `QubitPair` is built from two `Qubit` factors.
fn factor_generators(model: AncillaModel) -> (DMatrix<C64>, DMatrix<C64>) {
    match model {
        AncillaModel::Spin1 => (spin1(Axis::Z).entries().clone(), spin1(Axis::X).entries().clone()),
        AncillaModel::Qubit | AncillaModel::QubitPair => {
            (pauli(Axis::Z).entries().clone(), pauli(Axis::X).entries().clone())
        }
    }
}

/// Eigendecomposition of `H_f` together with the input amplitudes
/// `c_m = <m|phi>`.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: DMatrix<C64>,
    pub input_amplitudes: DVector<C64>,
    pub register_dims: Vec<usize>,
}

impl SectorDecomposition {
    /// `sum_m c_m |m>` in the computational basis.
    pub fn reconstruct(&self) -> DVector<C64> {
        &self.eigenvectors * &self.input_amplitudes
    }
}

/// Eigendecomposition of `H_f` alone. A diagonal `H_f` keeps the computational
/// basis and its ordering, with no numerical diagonalization.
pub fn register_eigenbasis(hf: &HermitianOperator) -> (Vec<f64>, DMatrix<C64>) {
    if hf.is_diagonal() {
        (hf.diagonal_real(), DMatrix::identity(hf.dim(), hf.dim()))
    } else {
        let s = hf.eigh();
        (s.values, s.vectors)
    }
}

pub fn decompose_sectors(hf: &HermitianOperator, phi: &StateVector) -> Result<SectorDecomposition> {
    if phi.dim() != hf.dim() {
        return Err(Error::Dimension { expected: hf.dim(), got: phi.dim() });
    }
    let (eigenvalues, eigenvectors) = register_eigenbasis(hf);
    let input_amplitudes = eigenvectors.adjoint() * phi.amplitudes();
    Ok(SectorDecomposition {
        eigenvalues,
        eigenvectors,
        input_amplitudes,
        register_dims: hf.subsystem_dims().to_vec(),
    })
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: StateVector,
    pub norm_drift: f64,
    /// Smallest non-degenerate level spacing seen along the anneal. For the
    /// sector path this is the true per-sector gap; for the full path it is a
    /// lower bound (levels of different sectors interleave).
    pub min_instantaneous_gap: f64,
    /// `<psi(t)|H(t)|psi(t)>` at the end of every step.
    pub energy_expectation_trace: Vec<f64>,
}

fn check_norm(v: &DVector<C64>, step: usize) -> Result<f64> {
    let norm = v.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite { step });
    }
    Ok((norm - 1.0).abs())
}

/// Schedule values at the end of step `k` (clamped onto the interval).
fn ab_after_step(spec: &AnnealSpec, k: usize) -> (f64, f64) {
    let t = ((k + 1) as f64 * spec.dt()).min(spec.duration());
    spec.eval(t).expect("clamped time lies in the schedule range")
}

/// Full-space propagation of `psi0` under `h_builder(A, B)`.
pub fn propagate_full<F>(h_builder: F, spec: &AnnealSpec, psi0: &StateVector) -> Result<EvolutionResult>
where
    F: Fn(f64, f64) -> HermitianOperator,
{
    let dt = spec.dt();
    let mut psi = psi0.amplitudes().clone();
    let mut min_gap = f64::INFINITY;
    let mut drift = 0.0_f64;
    let mut trace = Vec::with_capacity(spec.steps);
    for (k, (_, a, b)) in spec.midpoints().enumerate() {
        let h = h_builder(a, b);
        if h.dim() != psi.len() {
            return Err(Error::Dimension { expected: psi.len(), got: h.dim() });
        }
        let s = h.eigh();
        min_gap = min_gap.min(s.min_gap(DEGENERACY_TOL));
        psi = s.propagator(dt) * psi;
        drift = drift.max(check_norm(&psi, k)?);
        let (a1, b1) = ab_after_step(spec, k);
        let h1 = h_builder(a1, b1);
        trace.push(psi.dotc(&(h1.entries() * &psi)).re);
    }
    let final_state = StateVector::normalized(psi, psi0.subsystem_dims().to_vec())?;
    Ok(EvolutionResult { final_state, norm_drift: drift, min_instantaneous_gap: min_gap, energy_expectation_trace: trace })
}

/// Result of propagating the ancilla of a single sector.
#[derive(Clone, Debug)]
pub struct SectorEvolution {
    /// Accumulated `d x d` propagator of the whole anneal.
    pub unitary: DMatrix<C64>,
    /// `unitary * init`, when an initial ancilla state was tracked.
    pub final_state: Option<DVector<C64>>,
    pub min_gap: f64,
    /// `<chi(t)|H_m(t)|chi(t)>` per step, empty when nothing was tracked.
    pub energy_trace: Vec<f64>,
}

/// Ancilla step generator, step unitary and spectrum for one midpoint.
struct AncillaStepper {
    model: AncillaModel,
    gz: DMatrix<C64>,
    gx: DMatrix<C64>,
}

impl AncillaStepper {
    fn new(model: AncillaModel) -> Self {
        let (gz, gx) = factor_generators(model);
        Self { model, gz, gx }
    }

    fn factor_hamiltonian(&self, energy: f64, a: f64, b: f64) -> DMatrix<C64> {
        &self.gz * re(a * energy) + &self.gx * re(b)
    }

    /// Full ancilla Hamiltonian for expectation values.
    fn hamiltonian(&self, energy: f64, a: f64, b: f64) -> DMatrix<C64> {
        let h = self.factor_hamiltonian(energy, a, b);
        match self.model {
            AncillaModel::QubitPair => {
                let id = DMatrix::<C64>::identity(2, 2);
                h.kronecker(&id) + id.kronecker(&h)
            }
            _ => h,
        }
    }

    /// `(step unitary, min gap)`.
    fn step(&self, energy: f64, a: f64, b: f64, dt: f64) -> (DMatrix<C64>, f64) {
        let s = eigh(&self.factor_hamiltonian(energy, a, b));
        let u = s.propagator(dt);
        match self.model {
            AncillaModel::QubitPair => {
                // levels of h (x) I + I (x) h are pairwise sums
                let mut sums: Vec<f64> =
                    s.values.iter().flat_map(|x| s.values.iter().map(move |y| x + y)).collect();
                sums.sort_by(f64::total_cmp);
                let gap = crate::operators::Spectrum { values: sums, vectors: DMatrix::zeros(0, 0) }
                    .min_gap(DEGENERACY_TOL);
                (u.kronecker(&u), gap)
            }
            _ => (u, s.min_gap(DEGENERACY_TOL)),
        }
    }
}

/// Propagate the ancilla of the sector with energy `energy`.
pub fn propagate_sector(
    energy: f64,
    model: AncillaModel,
    spec: &AnnealSpec,
    init: Option<&DVector<C64>>,
) -> Result<SectorEvolution> {
    if energy.abs() < ZERO_ENERGY_TOL {
        return Err(Error::ZeroSectorEnergy { energy });
    }
    if let Some(v) = init {
        if v.len() != model.dim() {
            return Err(Error::Dimension { expected: model.dim(), got: v.len() });
        }
    }
    let stepper = AncillaStepper::new(model);
    let d = model.dim();
    let dt = spec.dt();
    let mut unitary = DMatrix::<C64>::identity(d, d);
    let mut chi = init.cloned();
    let mut min_gap = f64::INFINITY;
    let mut trace = Vec::with_capacity(if init.is_some() { spec.steps } else { 0 });
    for (k, (_, a, b)) in spec.midpoints().enumerate() {
        let (u, gap) = stepper.step(energy, a, b, dt);
        min_gap = min_gap.min(gap);
        unitary = &u * unitary;
        if let Some(c) = chi.as_mut() {
            *c = &u * &*c;
            let (a1, b1) = ab_after_step(spec, k);
            trace.push(c.dotc(&(stepper.hamiltonian(energy, a1, b1) * &*c)).re);
        }
    }
    if unitary.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite { step: spec.steps });
    }
    Ok(SectorEvolution { unitary, final_state: chi, min_gap, energy_trace: trace })
}

/// Groups eigenvalues equal within [`DEGENERACY_TOL`]; returns the
/// representative energies and the group of every index.
pub(crate) fn group_energies(eigenvalues: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut reps: Vec<f64> = Vec::new();
    let membership = eigenvalues
        .iter()
        .map(|&e| match reps.iter().position(|&r| (r - e).abs() <= DEGENERACY_TOL) {
            Some(g) => g,
            None => {
                reps.push(e);
                reps.len() - 1
            }
        })
        .collect();
    (reps, membership)
}

fn reject_zero_sectors(eigenvalues: &[f64]) -> Result<()> {
    match eigenvalues.iter().find(|e| e.abs() < ZERO_ENERGY_TOL) {
        Some(&energy) => Err(Error::ZeroSectorEnergy { energy }),
        None => Ok(()),
    }
}

/// Joint register (x) ancilla amplitudes from per-sector ancilla states,
/// assembled in ascending `m`.
fn assemble_joint(
    eigenvectors: &DMatrix<C64>,
    amplitudes: &DVector<C64>,
    ancilla_states: impl Fn(usize) -> DVector<C64>,
    d: usize,
) -> DVector<C64> {
    let n = eigenvectors.nrows();
    // rows: eigen-index m, columns: ancilla component
    let mut coeffs = DMatrix::<C64>::zeros(amplitudes.len(), d);
    for m in 0..amplitudes.len() {
        let chi = ancilla_states(m);
        for j in 0..d {
            coeffs[(m, j)] = amplitudes[m] * chi[j];
        }
    }
    let reg = eigenvectors * coeffs;
    DVector::from_fn(n * d, |idx, _| reg[(idx / d, idx % d)])
}

/// Per-sector propagation and reassembly of `sum_m c_m |m> (x) chi_m(T)`.
pub fn propagate_sectors(
    sectors: &SectorDecomposition,
    model: AncillaModel,
    spec: &AnnealSpec,
    ancilla_init: &StateVector,
) -> Result<EvolutionResult> {
    if ancilla_init.dim() != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), got: ancilla_init.dim() });
    }
    reject_zero_sectors(&sectors.eigenvalues)?;
    let (reps, membership) = group_energies(&sectors.eigenvalues);
    let runs: Vec<SectorEvolution> = reps
        .par_iter()
        .map(|&e| propagate_sector(e, model, spec, Some(ancilla_init.amplitudes())))
        .collect::<Result<_>>()?;

    let d = model.dim();
    let joint = assemble_joint(
        &sectors.eigenvectors,
        &sectors.input_amplitudes,
        |m| runs[membership[m]].final_state.clone().expect("tracked"),
        d,
    );
    let norm_drift = check_norm(&joint, spec.steps)?;

    let mut weights = vec![0.0; reps.len()];
    for (m, c) in sectors.input_amplitudes.iter().enumerate() {
        weights[membership[m]] += c.norm_sqr();
    }
    let trace = (0..spec.steps)
        .map(|k| runs.iter().zip(&weights).map(|(r, w)| w * r.energy_trace[k]).sum())
        .collect();
    let min_gap = runs.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);

    let mut dims = sectors.register_dims.clone();
    dims.extend_from_slice(ancilla_init.subsystem_dims());
    let final_state = StateVector::normalized(joint, dims)?;
    Ok(EvolutionResult { final_state, norm_drift, min_instantaneous_gap: min_gap, energy_expectation_trace: trace })
}

/// Anneal of `H_f` coupled to an ancilla, compiled once into one ancilla
/// propagator per distinct eigenvalue and reusable on any register state.
#[derive(Clone, Debug)]
pub struct CompiledAnneal {
    pub model: AncillaModel,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
    pub register_dims: Vec<usize>,
    membership: Vec<usize>,
    unitaries: Vec<DMatrix<C64>>,
    pub min_gap: f64,
}

impl CompiledAnneal {
    pub fn compile(hf: &HermitianOperator, model: AncillaModel, spec: &AnnealSpec) -> Result<Self> {
        let (eigenvalues, eigenvectors) = register_eigenbasis(hf);
        reject_zero_sectors(&eigenvalues)?;
        let (reps, membership) = group_energies(&eigenvalues);
        let runs: Vec<SectorEvolution> =
            reps.par_iter().map(|&e| propagate_sector(e, model, spec, None)).collect::<Result<_>>()?;
        let min_gap = runs.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);
        Ok(Self {
            model,
            eigenvalues,
            eigenvectors,
            register_dims: hf.subsystem_dims().to_vec(),
            membership,
            unitaries: runs.into_iter().map(|r| r.unitary).collect(),
            min_gap,
        })
    }

    pub fn register_dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// Ancilla propagator of sector `m`.
    pub fn sector_unitary(&self, m: usize) -> &DMatrix<C64> {
        &self.unitaries[self.membership[m]]
    }

    /// Largest unitarity defect `max |(U^dagger U - I)_ij|` over the sector
    /// propagators; bounds the norm drift of any evolved state.
    pub fn norm_drift(&self) -> f64 {
        self.unitaries
            .iter()
            .map(|u| {
                let d = u.nrows();
                (u.adjoint() * u - DMatrix::<C64>::identity(d, d)).iter().fold(0.0, |m: f64, z| m.max(z.norm()))
            })
            .fold(0.0, f64::max)
    }

    /// Joint final state for register input `phi` and ancilla input `ancilla`.
    pub fn evolve(&self, phi: &StateVector, ancilla: &StateVector) -> Result<StateVector> {
        if phi.dim() != self.register_dim() {
            return Err(Error::Dimension { expected: self.register_dim(), got: phi.dim() });
        }
        if ancilla.dim() != self.model.dim() {
            return Err(Error::Dimension { expected: self.model.dim(), got: ancilla.dim() });
        }
        let c = self.eigenvectors.adjoint() * phi.amplitudes();
        let chis: Vec<DVector<C64>> = self.unitaries.iter().map(|u| u * ancilla.amplitudes()).collect();
        let joint = assemble_joint(&self.eigenvectors, &c, |m| chis[self.membership[m]].clone(), self.model.dim());
        let mut dims = phi.subsystem_dims().to_vec();
        dims.extend_from_slice(ancilla.subsystem_dims());
        StateVector::normalized(joint, dims)
    }
}

/// `<target|_ancilla` applied to a joint state: the unnormalized register
/// vector `sum_j conj(target_j) psi[r, j]`.
pub fn project_ancilla(joint: &StateVector, target: &DVector<C64>) -> DVector<C64> {
    let d = target.len();
    let n = joint.dim() / d;
    let amps = joint.amplitudes();
    DVector::from_fn(n, |r, _| (0..d).map(|j| target[j].conj() * amps[r * d + j]).sum())
}

/// `|0_x> = (|+1> - |-1>)/sqrt2`, the zero-eigenvalue state of spin-1 `S_x`.
pub fn spin1_zero_x() -> StateVector {
    StateVector::from_slice(&[ONE, ZERO, -ONE], vec![3]).expect("normalizable")
}

/// `|0_z> = |0>` of spin-1 `S_z`.
pub fn spin1_zero_z() -> StateVector {
    StateVector::basis(vec![3], 1).expect("in range")
}

/// `<0_z| chi(T)` for a spin-1 started in `|0_x>` in the sector of `e_m`.
pub fn sector_overlap(e_m: f64, spec: &AnnealSpec) -> Result<C64> {
    let start = spin1_zero_x();
    let run = propagate_sector(e_m, AncillaModel::Spin1, spec, Some(start.amplitudes()))?;
    Ok(run.final_state.expect("tracked")[1])
}

/// Adiabatic phase `arg <0_z|chi(T)>` in `(-pi, pi]` of the spin-1 sector with
/// energy `e_m`.
pub fn sector_phase(e_m: f64, spec: &AnnealSpec) -> Result<f64> {
    let overlap = sector_overlap(e_m, spec)?;
    if overlap.norm() < 0.5 {
        return Err(Error::NonAdiabatic { quantity: "overlap with |0_z>", value: overlap.norm() });
    }
    Ok(overlap.arg())
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}
