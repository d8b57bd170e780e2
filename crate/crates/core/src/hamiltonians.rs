//! Problem, oracle and diffusion Hamiltonians.

use crate::error::{Error, Result};
use crate::operators::{kron, kron_embed, pauli, spin1, Axis, HermitianOperator};

/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Non-interacting test Hamiltonian `(n-1) eps I + sum_i eps_i sigma_z^i`
/// with `eps_i = signs[i] * eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingSpec {
    pub n: usize,
    pub epsilon: f64,
    pub signs: Vec<i8>,
}

impl IsingSpec {
    pub fn new(n: usize, epsilon: f64, signs: Vec<i8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("ising model needs at least one qubit".into()));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidSpec(format!("epsilon must be positive, got {epsilon}")));
        }
        if signs.len() != n {
            return Err(Error::InvalidSpec(format!("expected {n} signs, got {}", signs.len())));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpec("signs must be +1 or -1".into()));
        }
        Ok(Self { n, epsilon, signs })
    }

    /// All couplings `+eps`; the marked state is `|1...1>`.
    pub fn uniform(n: usize, epsilon: f64) -> Result<Self> {
        Self::new(n, epsilon, vec![1; n])
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Basis index of the unique negative-energy state: qubit `i` sits in
    /// `|1>` where `signs[i] = +1`.
    pub fn marked_index(&self) -> usize {
        self.signs.iter().fold(0, |acc, &s| (acc << 1) | usize::from(s > 0))
    }

    fn energy(&self, index: usize) -> f64 {
        let n = self.n;
        let field: f64 = self
            .signs
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let bit = (index >> (n - 1 - i)) & 1;
                let z = if bit == 0 { 1.0 } else { -1.0 };
                f64::from(s) * z
            })
            .sum();
        (n as f64 - 1.0) * self.epsilon + self.epsilon * field
    }
}

pub fn ising_hf(spec: &IsingSpec) -> HermitianOperator {
    let diag: Vec<f64> = (0..spec.dim()).map(|k| spec.energy(k)).collect();
    HermitianOperator::from_real_diagonal(&diag, vec![2; spec.n]).expect("diagonal real matrix is Hermitian")
}

/// Periodic spin-1 AKLT chain shifted by a chemical potential `c0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AkltSpec {
    pub n_sites: usize,
    pub c0: f64,
}

impl AkltSpec {
    pub fn new(n_sites: usize, c0: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidSpec(format!("AKLT chain needs at least 2 sites, got {n_sites}")));
        }
        if !c0.is_finite() {
            return Err(Error::InvalidSpec("c0 must be finite".into()));
        }
        Ok(Self { n_sites, c0 })
    }

    /// `c0 = -gap / 2`, the chemical potential centred in the gap.
    pub fn centered(n_sites: usize) -> Result<Self> {
        let gap = aklt_gap(&aklt_hamiltonian(n_sites)?)?;
        Self::new(n_sites, -gap / 2.0)
    }
}

/// Unshifted `sum_i [S_i.S_{i+1}/2 + (S_i.S_{i+1})^2/6 + 1/3]` with site
/// `n_sites` wrapping to site 0.
pub fn aklt_hamiltonian(n_sites: usize) -> Result<HermitianOperator> {
    if n_sites < 2 {
        return Err(Error::InvalidSpec(format!("AKLT chain needs at least 2 sites, got {n_sites}")));
    }
    let dims = vec![3; n_sites];
    let ops: Vec<[HermitianOperator; 3]> = (0..n_sites)
        .map(|site| {
            let embed = |axis| kron_embed(&spin1(axis), site, &dims);
            Ok([embed(Axis::X)?, embed(Axis::Y)?, embed(Axis::Z)?])
        })
        .collect::<Result<_>>()?;
    let identity = HermitianOperator::identity(dims.clone());
    let mut h = HermitianOperator::zeros(dims.clone());
    for i in 0..n_sites {
        let j = (i + 1) % n_sites;
        let mut dot = HermitianOperator::zeros(dims.clone());
        for a in 0..3 {
            dot = dot.add(&ops[i][a].hermitian_product(&ops[j][a])?)?;
        }
        let dot_sq = dot.hermitian_product(&dot)?;
        let bond = dot.scale(0.5).add(&dot_sq.scale(1.0 / 6.0))?.add(&identity.scale(1.0 / 3.0))?;
        h = h.add(&bond)?;
    }
    Ok(h)
}

/// Gap between the lowest and the next distinct eigenvalue.
pub fn aklt_gap(h: &HermitianOperator) -> Result<f64> {
    let values = h.eigh().values;
    values
        .iter()
        .find(|&&v| v - values[0] > DEGENERACY_TOL)
        .map(|&v| v - values[0])
        .ok_or_else(|| Error::SignStructure("spectrum is fully degenerate".into()))
}

/// `c0 I + H_AKLT`, validated to have exactly one negative eigenvalue, no zero
/// eigenvalue, and positive remaining spectrum.
pub fn aklt_hf(spec: &AkltSpec) -> Result<HermitianOperator> {
    let bare = aklt_hamiltonian(spec.n_sites)?;
    let gap = aklt_gap(&bare)?;
    let shifted = bare.add(&HermitianOperator::identity(bare.subsystem_dims().to_vec()).scale(spec.c0))?;
    let values = shifted.eigh().values;
    let negative = values.iter().filter(|&&v| v < 0.0).count();
    let near_zero = values.iter().any(|v| v.abs() < DEGENERACY_TOL);
    if negative != 1 || near_zero {
        return Err(Error::SignStructure(format!(
            "c0 = {} gives {negative} negative eigenvalue(s){}; unshifted gap is {gap:.6}, choose -gap < c0 < 0",
            spec.c0,
            if near_zero { " and a zero eigenvalue" } else { "" },
        )));
    }
    Ok(shifted)
}

/// Time-dependent Hamiltonian `a * coupled + b * driver`, with both pieces
/// assembled once.
#[derive(Clone, Debug)]
pub struct ScheduledHamiltonian {
    pub coupled: HermitianOperator,
    pub driver: HermitianOperator,
}

impl ScheduledHamiltonian {
    /// `H_f (x) S_z` and `I (x) S_x`.
    pub fn spin1_oracle(hf: &HermitianOperator) -> Self {
        let id = HermitianOperator::identity(hf.subsystem_dims().to_vec());
        Self { coupled: kron(hf, &spin1(Axis::Z)), driver: kron(&id, &spin1(Axis::X)) }
    }

    /// `H_f (x) (sz_a + sz_b)` and `I (x) (sx_a + sx_b)`, ancilla `a` before `b`.
    pub fn two_qubit_oracle(hf: &HermitianOperator) -> Self {
        let id = HermitianOperator::identity(hf.subsystem_dims().to_vec());
        let pair = |axis| {
            let p = pauli(axis);
            kron_embed(&p, 0, &[2, 2])
                .and_then(|a| a.add(&kron_embed(&p, 1, &[2, 2])?))
                .expect("qubit embedding")
        };
        Self { coupled: kron(hf, &pair(Axis::Z)), driver: kron(&id, &pair(Axis::X)) }
    }

    pub fn at(&self, a: f64, b: f64) -> HermitianOperator {
        self.coupled.combine(a, &self.driver, b).expect("pieces share a dimension")
    }

    pub fn dim(&self) -> usize {
        self.coupled.dim()
    }
}

pub fn oracle_hamiltonian_spin1(hf: &HermitianOperator, a: f64, b: f64) -> HermitianOperator {
    ScheduledHamiltonian::spin1_oracle(hf).at(a, b)
}

pub fn oracle_hamiltonian_two_qubit(hf: &HermitianOperator, a: f64, b: f64) -> HermitianOperator {
    ScheduledHamiltonian::two_qubit_oracle(hf).at(a, b)
}

/// `(n-1) eps I - eps sum_i sigma_x^i`: the Ising form with `sigma_z -> sigma_x`
/// and every coupling negative, so `|s> = |+...+>` is the unique
/// negative-energy state. `spec.signs` is not used.
pub fn diffusion_hamiltonian(spec: &IsingSpec) -> HermitianOperator {
    let dims = vec![2; spec.n];
    let mut h = HermitianOperator::identity(dims.clone()).scale((spec.n as f64 - 1.0) * spec.epsilon);
    let x = pauli(Axis::X);
    for i in 0..spec.n {
        let xi = kron_embed(&x, i, &dims).expect("qubit site");
        h = h.combine(1.0, &xi, -spec.epsilon).expect("same dims");
    }
    h
}
