//! Spontaneous emission of a single excited fermion in the presence of a
//! zero-temperature, spin-polarised Fermi sea held in an anisotropic
//! harmonic trap.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: integer-shape regularized incomplete gamma function and
//!   Poisson kernels.
//! * [`quadrature`]: Gauss-Legendre rules and angular averaging.
//! * [`trap`]: pancake/cigar spectra, shell degeneracies and state counts.
//! * [`recoil`]: Franck-Condon recoil probabilities per state and per shell.
//! * [`emission`]: the direction-resolved modification factor and its
//!   limits, decompositions and diagnostics.
//! * [`cli`]: the `fermisea` command-line front end.

pub mod cli;
pub mod emission;
pub mod error;
pub mod quadrature;
pub mod recoil;
pub mod special;
pub mod trap;

pub use error::{Error, Result};
