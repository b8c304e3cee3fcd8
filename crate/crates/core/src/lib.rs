//! Quantum state transfer and two-qubit gates between atomic ensembles held
//! in two cavities joined by an optical fiber.
//!
//! The crate builds the collective (symmetric Dicke) Hamiltonians, evolves
//! them unitarily or under a Lindblad master equation, and scores the four
//! protocols — state transfer, swap, entangling and controlled-Z gates —
//! by fidelity against their target states.

pub mod basis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod open;
pub mod operator;
pub mod protocols;

pub use basis::{conserved_excitation, enumerate_basis, BasisState, Subspace};
pub use config::{Model, SystemConfig};
pub use dynamics::{
    entangle_amplitudes, propagate, transfer_amplitudes, Ensemble, Propagator, StateVector,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    analytic_spectrum, build_hamiltonian, transfer_condition, AnalyticSpectrum, HermitianMatrix,
};
pub use open::{build_generator, evolve_master, small_n_oracle, DensityMatrix, LindbladGenerator};
pub use operator::C64;
pub use protocols::{
    find_peak, run, run_cz, run_entangle, run_swap, run_transfer, BellTarget, FidelitySeries, Peak,
    Protocol, Scenario, TimeGrid,
};
