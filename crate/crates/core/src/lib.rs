//! Simulator for Grover's oracle realized as an annealing step on an ancillary
//! spin: the register is coupled to a spin-1 (or two spin-1/2) ancilla, and
//! slow evolution flips the sign of the amplitude of the single
//! negative-energy eigenstate of the problem Hamiltonian through a
//! topological pi-phase.
//!
//! Module map:
//! - [`operators`]: dense Hermitian operators, states, spin matrices.
//! - [`hamiltonians`]: Ising and AKLT problem Hamiltonians, oracle and
//!   diffusion Hamiltonians.
//! - [`schedule`]: linear and tanh annealing schedules.
//! - [`evolver`]: full-space and per-sector time evolution.
//! - [`protocols`]: spin-1, measurement-based and Bell-state oracles.
//! - [`grover`]: complete Grover search and overlap estimation.

pub mod error;
pub mod evolver;
pub mod grover;
pub mod hamiltonians;
pub mod operators;
pub mod protocols;
pub mod schedule;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
