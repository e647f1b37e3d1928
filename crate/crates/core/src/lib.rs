//! Quantum-annealing ground-state energy estimation with a variance-based
//! certificate.
//!
//! The pipeline: build a problem Hamiltonian from Pauli strings
//! ([`pauli`]), anneal it from the transverse-field ground state under closed
//! or dephasing dynamics ([`dynamics`]), measure the energy mean and variance
//! of the final state ([`measure`]), and decide from a classical
//! pre-estimate of the two lowest levels whether `sqrt(ΔE²)` is a rigorous
//! error bar ([`certify`]). [`experiments`] sweeps annealing time and
//! dephasing rate and writes CSV tables.

pub mod error;
pub mod linalg;
pub mod pauli;
pub mod spectra;
pub mod state;
pub mod dynamics;
pub mod measure;
pub mod certify;
pub mod experiments;
#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};

/// Qubit Hamiltonian of H2 at 0.65 Å shipped in `data/h2_0.65A.ham`.
pub const H2_HAMILTONIAN: &str = include_str!("../../../data/h2_0.65A.ham");

pub fn h2_hamiltonian() -> pauli::PauliHamiltonian {
    pauli::PauliHamiltonian::parse(H2_HAMILTONIAN).expect("bundled Hamiltonian parses")
}
