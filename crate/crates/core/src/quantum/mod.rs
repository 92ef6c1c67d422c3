//! Jaynes–Cummings model with Lindblad losses on a truncated Fock space.

pub mod correlation;
pub mod expm;
pub mod integrate;
pub mod liouvillian;
pub mod operators;
pub mod params;
pub mod state;

pub use correlation::{two_time_correlation, CorrGrid};
pub use integrate::{evolve, evolve_with, propagate, Backend, EvolveOptions, Trajectory};
pub use liouvillian::{build_liouvillian, Superoperator};
pub use operators::{build_hamiltonian, Ladder, Operator};
pub use params::{HilbertSpec, SystemParams};
pub use state::{expectation, DensityMatrix, InvariantReport};
