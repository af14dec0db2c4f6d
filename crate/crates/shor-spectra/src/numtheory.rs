//! Exact integer arithmetic behind the shift operator: multiplicative
//! orders, modular exponentiation, and the cycle structure of
//! k ↦ x·k mod N on the residues {0, …, N−1}.

use serde::Serialize;

use crate::error::{Error, Result};

/// One cycle of the map k ↦ x·k mod N. Elements are stored in
/// powers-of-x order starting from the seed: `elements[n] = x^n·seed mod N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub seed: u64,
    pub elements: Vec<u64>,
    pub length: usize,
}

/// Complete partition of {0, …, N−1} into multiplication-by-x cycles.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitDecomposition {
    pub modulus: u64,
    pub base: u64,
    pub order: u64,
    pub orbits: Vec<Orbit>,
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Smallest r > 0 with x^r ≡ 1 (mod N).
pub fn mult_order(x: u64, modulus: u64) -> Result<u64> {
    if gcd(x, modulus) != 1 {
        return Err(Error::NotCoprime { base: x, modulus });
    }
    let mut acc = x % modulus;
    let mut r = 1u64;
    while acc != 1 {
        acc = mul_mod(acc, x % modulus, modulus);
        r += 1;
    }
    Ok(r)
}

fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    // u128 widening keeps the product exact for any u64 modulus.
    ((a as u128 * b as u128) % modulus as u128) as u64
}

/// x^j mod N by square-and-multiply, O(log j) multiplications.
pub fn mod_exp(x: u64, j: u64, modulus: u64) -> u64 {
    debug_assert!(modulus >= 2);
    let mut base = x % modulus;
    let mut exp = j;
    let mut acc = 1u64 % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    acc
}

/// Partition {0, …, N−1} into cycles of k ↦ x·k mod N, reported in
/// increasing order of seed. {0} is always a singleton orbit.
pub fn orbit_decomposition(x: u64, modulus: u64) -> Result<OrbitDecomposition> {
    if modulus < 3 || modulus % 2 == 0 {
        return Err(Error::Config(format!("modulus {modulus} must be odd and >= 3")));
    }
    let order = mult_order(x, modulus)?;
    let mut seen = vec![false; modulus as usize];
    let mut orbits = Vec::new();
    for seed in 0..modulus {
        if seen[seed as usize] {
            continue;
        }
        let mut elements = Vec::new();
        let mut k = seed;
        loop {
            seen[k as usize] = true;
            elements.push(k);
            k = mul_mod(k, x % modulus, modulus);
            if k == seed {
                break;
            }
        }
        let length = elements.len();
        orbits.push(Orbit { seed, elements, length });
    }
    Ok(OrbitDecomposition { modulus, base: x, order, orbits })
}
