//! Composite bosons made of lattice fermions.
//!
//! Builds the one-dimensional extended Hubbard model (two fermion species A
//! and B on a periodic ring) together with its strong-coupling hard-core pair
//! model, finds ground states, constructs composite-boson trial states and
//! evaluates their bosonic quality: normalization ratios χ, purities,
//! fidelities, pair correlation functions and energy estimates for different
//! assemblies of pairs into larger compounds.
//!
//! Modules follow the data flow:
//!
//! * [`fock`]: bitmask Fock bases, elementary operators, state vectors.
//! * [`model`]: Hamiltonians as sparse Hermitian operators.
//! * [`solve`]: ground spaces and closed-form two-body bound states.
//! * [`ansatz`]: composite-boson trial states.
//! * [`metrics`]: every quality measure computed on those states.
//! * [`cli`]: CSV-producing experiment runner behind the `coboson` binary.

pub mod ansatz;
pub mod cli;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod model;
pub mod solve;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
