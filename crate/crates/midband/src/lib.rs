//! Numerical laboratory for finite-volume random lattice Schrödinger
//! operators: deterministic lattice operators and their commutators, sparse
//! plateau-bump random potentials, conjugate-operator positivity estimates,
//! and spectral witnesses (band predictions, quasimode residuals, eigenvalue
//! histograms), driven by a reproducible experiment CLI.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod mourre;
pub mod potential;
pub mod rng;
pub mod smoothstep;
pub mod spectral;

pub use error::{Error, Result};
