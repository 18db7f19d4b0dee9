//! Quantum dynamics of an `N`-particle spin-1/2 ensemble under the two-axis
//! counter-twisting Hamiltonian.
//!
//! * [`spin`] builds spin operators, Fock and coherent states, rotations.
//! * [`dynamics`] builds the Hamiltonian family and propagates exactly.
//! * [`metrology`] computes moments, squeezing, Fisher information and fidelities.
//! * [`phase_space`] samples Husimi and spherical Wigner functions.
//! * [`meanfield`] covers the classical phase portrait, the Gaussian
//!   moment model and the frozen-spin approximation.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod meanfield;
pub mod metrology;
pub mod phase_space;
pub mod search;
pub mod spin;

pub use dynamics::{build_hamiltonian, diagonalize, HamiltonianKind, HamiltonianSpec, Propagator};
pub use error::{Error, Result};
pub use spin::{
    build_spin_matrices, coherent_state, fock_state, rotate_state, BlochDirection, ParticleNumber,
    SpinMatrices, StateVector,
};
