//! Cavity-QED figures of merit for a two-level emitter in a single-mode
//! nanophotonic cavity.
//!
//! - [`quantum`]: Jaynes–Cummings Hamiltonian, Lindblad generator, time
//!   evolution and two-time correlations.
//! - [`fom`]: cooperativity, cavity efficiency, photon indistinguishability
//!   and the coupling ↔ mode-volume conversion.
//! - [`reflection`]: spin-dependent reflection spectra with spectral drift and
//!   readout contrast.
//! - [`field`]: electromagnetic field grids, mode volume and coupling maps.
//! - [`implant`]: coupling statistics over an emitter placement region.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod fom;
pub mod implant;
pub mod numeric;
pub mod quantum;
pub mod reflection;
pub mod units;

pub use error::{Error, Result};
pub use field::{FieldGrid, GridGeometry, ModeVolume, ScalarField, SynthSpec};
pub use fom::{DipoleSpec, FomNumerics, FomResult, Orientation};
pub use implant::{GDistribution, ImplantRegion, LateralPlane, Plane};
pub use quantum::{DensityMatrix, HilbertSpec, Operator, Superoperator, SystemParams, Trajectory};
pub use reflection::{ProbePolicy, Spectrum, SpinConfig};
