//! Numerical laboratory for two-qubit dephasing dynamics driven by local
//! interactions with an initially correlated composite environment.
//!
//! The crate is organised bottom-up:
//!
//! * [`qlinalg`]: dense 2×2 / 4×4 complex matrices, Hermitian eigenvalues,
//!   partial trace and trace distance.
//! * [`dephasing`]: the general two-qubit dephasing map, interaction
//!   schedules and the [`dephasing::DecoherenceModel`] interface.
//! * [`multimode`]: qubits coupled to correlated multimode bosonic fields
//!   (discrete modes, continuum quadrature, ohmic closed forms).
//! * [`photon`]: polarization-entangled photons crossing birefringent plates.
//! * [`blp`]: trace-distance trajectories and the non-Markovianity measure.
//! * [`cli`]: figure-data generation used by the `nlmem` binary.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blp;
pub mod cli;
pub mod dephasing;
mod error;
pub mod multimode;
pub mod photon;
pub mod qlinalg;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
