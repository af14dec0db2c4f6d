//! Exact eigendecomposition of the shift permutation from its orbit
//! structure. Each orbit of length ρ contributes ρ Fourier eigenvectors:
//! the j-th one has component e^{−2πijn/ρ}/√ρ on basis state x^n·i₀ mod N
//! and eigenvalue e^{+2πij/ρ}.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::OrbitDecomposition;
use crate::operators::TAU;

#[derive(Debug, Clone)]
pub struct ShiftEigenpair {
    /// Eigenangle in [0, 2π); the eigenvalue is e^{iθ}.
    pub theta: f64,
    /// Eigenvector in dimension `pad_dim`, zero above N.
    pub vector: Vec<Complex64>,
    pub orbit_seed: u64,
    /// Harmonic index j in [0, ρ) within the seed's orbit.
    pub harmonic: u64,
}

pub fn shift_eigenbasis(decomp: &OrbitDecomposition, pad_dim: usize) -> Result<Vec<ShiftEigenpair>> {
    if (pad_dim as u64) < decomp.modulus {
        return Err(Error::BadDimension {
            dim: pad_dim,
            reason: format!("must be >= modulus {}", decomp.modulus),
        });
    }
    let mut pairs = Vec::with_capacity(decomp.modulus as usize);
    for orbit in &decomp.orbits {
        let rho = orbit.length as u64;
        let norm = 1.0 / (rho as f64).sqrt();
        for j in 0..rho {
            let mut vector = vec![Complex64::new(0.0, 0.0); pad_dim];
            for (n, &elem) in orbit.elements.iter().enumerate() {
                let angle = -TAU * (j as f64) * (n as f64) / rho as f64;
                vector[elem as usize] = Complex64::from_polar(norm, angle);
            }
            pairs.push(ShiftEigenpair {
                theta: TAU * reduced_fraction(j, rho),
                vector,
                orbit_seed: orbit.seed,
                harmonic: j,
            });
        }
    }
    Ok(pairs)
}

fn reduced_fraction(j: u64, rho: u64) -> f64 {
    j as f64 / rho as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenangleClass {
    pub theta: f64,
    pub multiplicity: usize,
    /// Seeds of the orbits contributing eigenvectors at this angle.
    pub seeds: Vec<u64>,
}

/// Sorted distinct eigenangles of S with multiplicities summing to N.
/// Angles are grouped exactly, as reduced fractions j/ρ of a full turn.
pub fn distinct_eigenangles(decomp: &OrbitDecomposition) -> Vec<EigenangleClass> {
    let mut classes: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
    for orbit in &decomp.orbits {
        let rho = orbit.length as u64;
        for j in 0..rho {
            let g = crate::numtheory::gcd(j, rho);
            classes.entry((j / g, rho / g)).or_default().push(orbit.seed);
        }
    }
    let mut out: Vec<EigenangleClass> = classes
        .into_iter()
        .map(|((p, q), seeds)| EigenangleClass {
            theta: TAU * p as f64 / q as f64,
            multiplicity: seeds.len(),
            seeds,
        })
        .collect();
    out.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
    out
}
