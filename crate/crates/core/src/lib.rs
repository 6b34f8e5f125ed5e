//! Qubit simulation of one-dimensional SU(2) lattice gauge theory with
//! staggered matter: the gauge-eliminated spin Hamiltonian, exact
//! diagonalization in symmetry sectors, parameterized circuits, a statevector
//! simulator with noise and mitigation, and the variational hadron-mass
//! protocols built on them.

pub mod circuit;
pub mod error;
pub mod exact;
pub mod model;
pub mod par;
pub mod pauli;
pub mod sim;
pub mod vqe;

pub use error::{Error, Result};
pub use par::ExecMode;
