//! Sparse Hamiltonian learning against a simulated time-evolution oracle.
//!
//! The crate is `no_std` with `alloc`. Everything that touches the outside
//! world (files, threads, command line) lives in the `hamlearn` companion
//! crate; this one holds the algebra and the algorithms:
//!
//! * [`pauli`]: n-qubit Pauli strings in the 2n-bit symplectic representation.
//! * [`hamiltonian`]: sparse Pauli-basis Hamiltonians, restriction, norms, spectra.
//! * [`oracle`]: the evolution/sampling access model with resource accounting.
//! * [`isolation`]: random commutant filtering that isolates single terms.
//! * [`learner`]: support learning, single-coefficient learning and the full learner.
//! * [`distances`]: time- and temperature-constrained Hamiltonian distances and their bounds.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod distances;
pub mod error;
pub mod hamiltonian;
pub mod isolation;
pub mod learner;
pub mod linalg;
pub mod oracle;
pub mod pauli;

pub use error::{Error, Result};
pub use hamiltonian::{Norms, SparseHamiltonian, SpectralData};
pub use learner::{LearnResult, LearnerParams};
pub use oracle::{EvolutionMode, EvolutionOracle, OracleConfig, ResourceLedger, TrotterPlan};
pub use pauli::{Phase, PauliString};

/// Largest qubit count for which dense `2^n x 2^n` matrices are materialized.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Coefficients below this magnitude are dropped from sparse Hamiltonians.
pub const ZERO_TOLERANCE: f64 = 1e-15;
