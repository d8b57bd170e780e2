//! Dense Hermitian operators, normalized state vectors, and the spin matrices
//! every Hamiltonian in the crate is assembled from.
//!
//! Subsystem ordering: the leftmost entry of `subsystem_dims` is the most
//! significant index of the flattened basis. The computational register always
//! comes first and ancillas last. For qubits `|0>` is the `+1` eigenstate of
//! `sigma_z`; for spin-1 the basis is ordered `(|+1>, |0>, |-1>)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Elementwise tolerance of the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on the Euclidean norm of a state.
pub const NORM_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense complex Hermitian matrix with a declared tensor-product structure.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<C64>,
    subsystem_dims: Vec<usize>,
}

impl HermitianOperator {
    pub fn new(entries: DMatrix<C64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(Error::Dimension { expected: dim, got: entries.ncols() });
        }
        let product: usize = subsystem_dims.iter().product();
        if dim == 0 || product != dim || subsystem_dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension { expected: dim, got: product });
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { entries, subsystem_dims })
    }

    /// Operator on a single subsystem of dimension `entries.nrows()`.
    pub fn single(entries: DMatrix<C64>) -> Result<Self> {
        let d = entries.nrows();
        Self::new(entries, vec![d])
    }

    pub fn from_real_diagonal(diag: &[f64], subsystem_dims: Vec<usize>) -> Result<Self> {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&x| re(x))));
        Self::new(m, subsystem_dims)
    }

    pub fn identity(subsystem_dims: Vec<usize>) -> Self {
        let dim = subsystem_dims.iter().product();
        Self { entries: DMatrix::identity(dim, dim), subsystem_dims }
    }

    pub fn zeros(subsystem_dims: Vec<usize>) -> Self {
        let dim = subsystem_dims.iter().product();
        Self { entries: DMatrix::zeros(dim, dim), subsystem_dims }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    /// `a * self + b * other`; real coefficients keep the result Hermitian.
    pub fn combine(&self, a: f64, other: &HermitianOperator, b: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(Self {
            entries: &self.entries * re(a) + &other.entries * re(b),
            subsystem_dims: self.subsystem_dims.clone(),
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { entries: &self.entries * re(a), subsystem_dims: self.subsystem_dims.clone() }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    /// Product of two commuting (or conjugate-symmetric) operators, checked
    /// for Hermiticity.
    pub fn hermitian_product(&self, other: &HermitianOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Self::new(&self.entries * &other.entries, self.subsystem_dims.clone())
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == ZERO))
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn apply(&self, state: &StateVector) -> Result<DVector<C64>> {
        if state.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: state.dim() });
        }
        Ok(&self.entries * state.amplitudes())
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let hv = self.apply(state)?;
        Ok(state.amplitudes().dotc(&hv).re)
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigh().values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Hermitian eigendecomposition, eigenvalues ascending. Every spectral
    /// query in the crate goes through this routine.
    pub fn eigh(&self) -> Spectrum {
        eigh(&self.entries)
    }

    /// Conjugation `U H U^dagger` by a unitary on the same space.
    pub fn conjugate_by(&self, unitary: &DMatrix<C64>) -> Result<Self> {
        Self::new(unitary * &self.entries * unitary.adjoint(), self.subsystem_dims.clone())
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues (ascending) and orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    /// Rebuild `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| re(x)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }

    /// `exp(-i H dt)` from the decomposition.
    pub fn propagator(&self, dt: f64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -e * dt);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Smallest spacing between adjacent eigenvalues that exceeds `degeneracy_tol`.
    pub fn min_gap(&self, degeneracy_tol: f64) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&g| g > degeneracy_tol)
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn eigh(m: &DMatrix<C64>) -> Spectrum {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum { values, vectors }
}

/// Normalized state over a tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    subsystem_dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        let product: usize = subsystem_dims.iter().product();
        if amplitudes.is_empty() || product != amplitudes.len() {
            return Err(Error::Dimension { expected: amplitudes.len(), got: product });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, subsystem_dims })
    }

    /// Normalize `raw` first; fails only on a zero or non-finite vector.
    pub fn normalized(raw: DVector<C64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        let norm = raw.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(raw / re(norm), subsystem_dims)
    }

    pub fn from_slice(amps: &[C64], subsystem_dims: Vec<usize>) -> Result<Self> {
        Self::normalized(DVector::from_column_slice(amps), subsystem_dims)
    }

    pub fn basis(subsystem_dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim: usize = subsystem_dims.iter().product();
        if index >= dim {
            return Err(Error::Dimension { expected: dim, got: index });
        }
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Self::new(v, subsystem_dims)
    }

    /// `|s> = |+>^{\otimes n}`, the uniform superposition over `n` qubits.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let amp = re(1.0 / (dim as f64).sqrt());
        Self { amplitudes: DVector::from_element(dim, amp), subsystem_dims: vec![2; n_qubits] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut dims = self.subsystem_dims.clone();
        dims.extend_from_slice(&other.subsystem_dims);
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        Self { amplitudes: amps, subsystem_dims: dims }
    }

    pub fn with_global_phase(&self, theta: f64) -> StateVector {
        Self {
            amplitudes: &self.amplitudes * C64::from_polar(1.0, theta),
            subsystem_dims: self.subsystem_dims.clone(),
        }
    }

    /// Apply an arbitrary unitary and keep the result normalized.
    pub fn evolve(&self, unitary: &DMatrix<C64>) -> Result<StateVector> {
        if unitary.ncols() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: unitary.ncols() });
        }
        Self::normalized(unitary * &self.amplitudes, self.subsystem_dims.clone())
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

pub fn pauli(axis: Axis) -> HermitianOperator {
    let m = match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    };
    HermitianOperator { entries: m, subsystem_dims: vec![2] }
}

/// Spin-1 projection matrices in the `(|+1>, |0>, |-1>)` basis.
pub fn spin1(axis: Axis) -> HermitianOperator {
    let h = re(std::f64::consts::FRAC_1_SQRT_2);
    let ih = I * std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = match axis {
        Axis::X => DMatrix::from_row_slice(3, 3, &[
            ZERO, h, ZERO,
            h, ZERO, h,
            ZERO, h, ZERO,
        ]),
        Axis::Y => DMatrix::from_row_slice(3, 3, &[
            ZERO, -ih, ZERO,
            ih, ZERO, -ih,
            ZERO, ih, ZERO,
        ]),
        Axis::Z => DMatrix::from_row_slice(3, 3, &[
            ONE, ZERO, ZERO,
            ZERO, ZERO, ZERO,
            ZERO, ZERO, -ONE,
        ]),
    };
    HermitianOperator { entries: m, subsystem_dims: vec![3] }
}

/// Single-qubit Hadamard; it is Hermitian as well as unitary.
pub fn hadamard() -> HermitianOperator {
    let h = re(std::f64::consts::FRAC_1_SQRT_2);
    HermitianOperator { entries: DMatrix::from_row_slice(2, 2, &[h, h, h, -h]), subsystem_dims: vec![2] }
}

/// `H^{\otimes n}` as a plain matrix.
pub fn hadamard_all(n_qubits: usize) -> DMatrix<C64> {
    let h = hadamard();
    (0..n_qubits).fold(DMatrix::identity(1, 1), |acc, _| acc.kronecker(h.entries()))
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    let mut dims = a.subsystem_dims.clone();
    dims.extend_from_slice(&b.subsystem_dims);
    HermitianOperator { entries: a.entries.kronecker(&b.entries), subsystem_dims: dims }
}

/// `I (x) ... (x) op (x) ... (x) I` with `op` acting on `site`.
pub fn kron_embed(op: &HermitianOperator, site: usize, site_dims: &[usize]) -> Result<HermitianOperator> {
    let expected = *site_dims
        .get(site)
        .ok_or_else(|| Error::InvalidSpec(format!("site {site} out of range for {} sites", site_dims.len())))?;
    if op.dim() != expected {
        return Err(Error::SiteDimension { site, expected, got: op.dim() });
    }
    let left: usize = site_dims[..site].iter().product();
    let right: usize = site_dims[site + 1..].iter().product();
    let entries = DMatrix::<C64>::identity(left, left)
        .kronecker(&op.entries)
        .kronecker(&DMatrix::<C64>::identity(right, right));
    Ok(HermitianOperator { entries, subsystem_dims: site_dims.to_vec() })
}

/// `[A, B] = AB - BA` as a plain matrix (anti-Hermitian for Hermitian inputs).
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> DMatrix<C64> {
    &a.entries * &b.entries - &b.entries * &a.entries
}

/// `1 - |<ideal|state>|^2`, evaluated as the squared norm of the part of
/// `state` orthogonal to `ideal` so that values far below machine epsilon
/// survive.
pub fn infidelity(state: &StateVector, ideal: &StateVector) -> Result<f64> {
    let overlap = ideal.inner(state)?;
    let perp = state.amplitudes() - ideal.amplitudes() * overlap;
    Ok(perp.norm_squared().min(1.0))
}
