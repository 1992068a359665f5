//! Discrete Schrödinger operators with the limit-periodic potential built
//! from a dyadic distal sequence, and numerical checks that their
//! integrated density of states is Lipschitz.
//!
//! - [`dyadic`]: the sequence `λ`, its truncations and dyadic intervals.
//! - [`lattice`]: geometric lattice sums and their averages.
//! - [`spectral`]: operators, spectra, localized eigenvectors.
//! - [`ids`]: empirical IDS, interval masses and moduli of continuity.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod error;
pub mod ids;
pub mod lattice;
pub mod spectral;

pub use error::{Error, Result};
