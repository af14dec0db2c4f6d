//! Spectral analysis of the unitary operators appearing in Shor's
//! order-finding algorithm.
//!
//! The full operator U = (F⁻¹⊗Id)·U_x·(H⊗Id) commutes with Id⊗S, where
//! S is the shift permutation k ↦ x·k mod N. This library constructs all
//! of these operators, block-diagonalizes U into 2^{n1}-dimensional
//! sectors F⁻¹ΛH labelled by shift eigenangles, and runs the
//! quantum-chaos diagnostics on the block spectra: nearest-neighbor
//! eigenangle spacings against the CUE Wigner surmise and eigenvector
//! intensities against the exponential law.

pub mod error;
pub mod experiment;
pub mod io;
pub mod numtheory;
pub mod operators;
pub mod shift_spectrum;
pub mod spectral_stats;
pub mod structure_analysis;

pub use error::{Error, Result};
