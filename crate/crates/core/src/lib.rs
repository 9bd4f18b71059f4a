//! Thermalization of qubits: master-equation dynamics, ancilla-based channel
//! simulation, thermalizing Hamiltonians, a four-qubit cooling model and a
//! dephasing non-Markovianity witness.

pub mod channel;
pub mod error;
pub mod fourqubit;
pub mod hamiltonian;
pub mod linalg;
pub mod master;
pub mod nonmarkov;
pub mod report;
pub mod thermo;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use thermo::{BlochVector, ThermalParam};
