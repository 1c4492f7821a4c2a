//! Probability currents in open quantum systems, worked out on a dissipative
//! two-qutrit rotor.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense complex linear algebra and a validated density matrix.
//! * [`rotor`]: operators of the two-particle rotor (Hamiltonian, rotations,
//!   site projectors, bath couplings).
//! * [`master_eq`]: classical, local and global Markovian generators.
//! * [`currents`]: current operators, averages, Margenau-Hill rates, weak values.
//! * [`steady_state`]: symmetry-resolved stationary states.
//! * [`observables`]: heat flux, negativity, ergotropy and related quantities.
//! * [`continuum`]: the lattice-to-continuum limit of the tunneling current.
//! * [`oracles`]: slow, independent reference implementations used by tests.

pub mod continuum;
pub mod currents;
pub mod error;
pub mod master_eq;
pub mod numerics;
pub mod observables;
pub mod oracles;
pub mod random;
pub mod rotor;
pub mod steady_state;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, DensityMatrix, Subsystem, C64};
