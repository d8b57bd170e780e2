use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch at site {site}: operator has dim {got}, site expects {expected}")]
    SiteDimension { site: usize, expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("time {t} outside schedule range [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("non-finite amplitude after step {step}; eigen-solver failure")]
    NonFinite { step: usize },

    #[error("sector with zero energy (E_m = {energy:e}); chemical potential is mis-tuned")]
    ZeroSectorEnergy { energy: f64 },

    #[error("unsupported ancilla dimension {0}")]
    UnsupportedAncilla(usize),

    #[error("oracle requires exactly one negative eigenvalue, found {count}")]
    NegativeEigenvalueCount { count: usize },

    #[error("non-adiabatic breakdown: {quantity} {value:.4} below 0.5; increase total_time")]
    NonAdiabatic { quantity: &'static str, value: f64 },

    #[error("no overlap detected between initial and target state")]
    NoOverlap,

    #[error("{attempts} consecutive failed oracle calls; check RNG usage")]
    RetryLimit { attempts: usize },

    #[error("spectrum does not have the required sign structure: {0}")]
    SignStructure(String),
}
