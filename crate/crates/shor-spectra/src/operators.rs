//! Construction of the unitary matrices of the order-finding algorithm:
//! the Fourier and Hadamard transforms F and H, the shift permutation S,
//! the modular exponentiation operator U_x, the diagonal phase operator
//! Λ, the composite operators U = (F⁻¹⊗Id)·U_x·(H⊗Id) and
//! Ũ = (F⁻¹⊗Id)·U_x·(F⊗Id), and the symmetry-reduced blocks F⁻¹ΛH built
//! both by matrix composition and by the entrywise product formula.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numtheory::{self, gcd, mod_exp, mult_order};

pub const TAU: f64 = 2.0 * PI;

/// Dense complex matrix with a unitarity contract. Entry (row k, col l)
/// is `entries[[k, l]]`.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    pub dim: usize,
    pub entries: Array2<Complex64>,
    pub label: String,
}

impl UnitaryMatrix {
    pub fn new(entries: Array2<Complex64>, label: impl Into<String>) -> Self {
        let dim = entries.nrows();
        assert_eq!(dim, entries.ncols(), "matrix must be square");
        Self { dim, entries, label: label.into() }
    }

    pub fn identity(dim: usize, label: impl Into<String>) -> Self {
        Self::new(Array2::eye(dim).mapv(|x: f64| Complex64::new(x, 0.0)), label)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Array2::zeros((self.dim, self.dim));
        for k in 0..self.dim {
            for l in 0..self.dim {
                out[[l, k]] = self.entries[[k, l]].conj();
            }
        }
        Self::new(out, format!("{}^dagger", self.label))
    }

    pub fn matmul(&self, rhs: &Self, label: impl Into<String>) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self::new(matmul(&self.entries, &rhs.entries), label.into())
    }

    /// Max-entry deviation of U†U from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entries[[k, i]].conj() * self.entries[[k, j]];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

/// Plain triple-loop product; inner loop over the shared index keeps the
/// rhs access row-contiguous.
pub fn matmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, m) = (a.nrows(), b.ncols());
    let k_dim = a.ncols();
    assert_eq!(k_dim, b.nrows());
    let mut out = Array2::zeros((n, m));
    for i in 0..n {
        for k in 0..k_dim {
            let aik = a[[i, k]];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[[i, j]] += aik * b[[k, j]];
            }
        }
    }
    out
}

/// Two-register layout: n1 qubits indexing the Fourier/Hadamard register,
/// n2 qubits holding residues mod N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterShape {
    pub n1: u32,
    pub n2: u32,
    pub modulus: u64,
    pub base: u64,
}

impl RegisterShape {
    pub fn new(n1: u32, n2: u32, modulus: u64, base: u64) -> Result<Self> {
        if modulus < 3 || modulus % 2 == 0 {
            return Err(Error::Config(format!("modulus {modulus} must be odd and >= 3")));
        }
        if gcd(base, modulus) != 1 {
            return Err(Error::NotCoprime { base, modulus });
        }
        if (1u128 << n2) < modulus as u128 {
            return Err(Error::Config(format!(
                "second register of {n2} qubits cannot hold residues mod {modulus}"
            )));
        }
        Ok(Self { n1, n2, modulus, base })
    }

    /// Smallest shape whose second register holds residues mod N.
    pub fn minimal(n1: u32, modulus: u64, base: u64) -> Result<Self> {
        let n2 = 64 - (modulus - 1).leading_zeros().min(63);
        Self::new(n1, n2.max(1), modulus, base)
    }

    pub fn first_dim(&self) -> usize {
        1usize << self.n1
    }

    pub fn second_dim(&self) -> usize {
        1usize << self.n2
    }
}

/// One symmetry sector of the shift operator: the eigenangle θ labelling
/// it and the first-register size. θ is normalized to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSpec {
    pub theta: f64,
    pub n1: u32,
}

impl BlockSpec {
    pub fn new(theta: f64, n1: u32) -> Self {
        Self { theta: normalize_angle(theta), n1 }
    }
}

/// Map an angle to [0, 2π), snapping values within 1e-12 of 2π to 0.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    if (TAU - t).abs() < 1e-12 {
        t = 0.0;
    }
    t
}

fn dense_guard(dim: usize, default_max: usize) -> Result<()> {
    let guard = std::env::var("SHOR_SPECTRA_MAX_DIM")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(default_max);
    if dim > guard {
        return Err(Error::DimensionTooLarge { dim, guard });
    }
    Ok(())
}

/// Discrete Fourier transform on n1 qubits:
/// F[j][k] = exp(+2πi·jk/2^{n1})/√(2^{n1}).
pub fn fourier_matrix(n1: u32) -> Result<UnitaryMatrix> {
    let dim = 1usize << n1;
    dense_guard(dim, 1 << 14)?;
    let norm = 1.0 / (dim as f64).sqrt();
    let mut out = Array2::zeros((dim, dim));
    for j in 0..dim {
        for k in 0..dim {
            let angle = TAU * ((j * k) % dim) as f64 / dim as f64;
            out[[j, k]] = Complex64::from_polar(norm, angle);
        }
    }
    Ok(UnitaryMatrix::new(out, format!("F(n1={n1})")))
}

/// n1-fold tensor power of the 2×2 Hadamard:
/// H[m][l] = (−1)^{popcount(m & l)}/√(2^{n1}).
pub fn hadamard_matrix(n1: u32) -> Result<UnitaryMatrix> {
    let dim = 1usize << n1;
    dense_guard(dim, 1 << 14)?;
    let norm = 1.0 / (dim as f64).sqrt();
    let mut out = Array2::zeros((dim, dim));
    for m in 0..dim {
        for l in 0..dim {
            let sign = if (m & l).count_ones() % 2 == 0 { norm } else { -norm };
            out[[m, l]] = Complex64::new(sign, 0.0);
        }
    }
    Ok(UnitaryMatrix::new(out, format!("H(n1={n1})")))
}

/// Shift permutation on `dim` states: k ↦ x·k mod N for k < N, identity
/// above. Exactly one 1 per row and column.
pub fn shift_matrix(x: u64, modulus: u64, dim: usize) -> Result<UnitaryMatrix> {
    if gcd(x, modulus) != 1 {
        return Err(Error::NotCoprime { base: x, modulus });
    }
    if (dim as u64) < modulus {
        return Err(Error::BadDimension {
            dim,
            reason: format!("must be >= modulus {modulus}"),
        });
    }
    dense_guard(dim, 1 << 14)?;
    let mut out = Array2::zeros((dim, dim));
    for k in 0..dim {
        let row = shift_image(x, modulus, k);
        out[[row, k]] = Complex64::new(1.0, 0.0);
    }
    Ok(UnitaryMatrix::new(out, format!("S(x={x},N={modulus},dim={dim})")))
}

fn shift_image(x: u64, modulus: u64, k: usize) -> usize {
    if (k as u64) < modulus {
        ((x as u128 * k as u128) % modulus as u128) as usize
    } else {
        k
    }
}

/// The modular exponentiation operator U_x|j⟩|k⟩ = |j⟩|x^j k mod N⟩
/// (identity for k ≥ N), stored as an index permutation over the full
/// 2^{n1+n2}-dimensional product basis with composite index j·2^{n2}+k.
#[derive(Debug, Clone)]
pub struct ModularExponentiationOperator {
    pub shape: RegisterShape,
    /// image[col] = row of the single 1 in that column.
    pub image: Vec<usize>,
}

pub fn modular_exponentiation_operator(shape: RegisterShape) -> Result<ModularExponentiationOperator> {
    let total_qubits = shape.n1 + shape.n2;
    if total_qubits > 20 {
        return Err(Error::DimensionTooLarge { dim: 1 << total_qubits.min(63), guard: 1 << 20 });
    }
    let d1 = shape.first_dim();
    let d2 = shape.second_dim();
    let mut image = vec![0usize; d1 * d2];
    for j in 0..d1 {
        let xj = mod_exp(shape.base, j as u64, shape.modulus);
        for k in 0..d2 {
            let target = if (k as u64) < shape.modulus {
                ((xj as u128 * k as u128) % shape.modulus as u128) as usize
            } else {
                k
            };
            image[j * d2 + k] = j * d2 + target;
        }
    }
    Ok(ModularExponentiationOperator { shape, image })
}

impl ModularExponentiationOperator {
    pub fn dim(&self) -> usize {
        self.image.len()
    }

    pub fn dense(&self) -> Result<UnitaryMatrix> {
        let dim = self.dim();
        dense_guard(dim, 1 << 13)?;
        let mut out = Array2::zeros((dim, dim));
        for (col, &row) in self.image.iter().enumerate() {
            out[[row, col]] = Complex64::new(1.0, 0.0);
        }
        Ok(UnitaryMatrix::new(
            out,
            format!("U_x(x={},N={})", self.shape.base, self.shape.modulus),
        ))
    }
}

/// Diagonal phase operator Λ with entries e^{i·m·θ}, m = 0…2^{n1}−1.
pub fn lambda_matrix(spec: BlockSpec) -> UnitaryMatrix {
    let dim = 1usize << spec.n1;
    let mut out = Array2::zeros((dim, dim));
    for m in 0..dim {
        out[[m, m]] = Complex64::from_polar(1.0, spec.theta * m as f64);
    }
    UnitaryMatrix::new(out, format!("Lambda(theta={})", spec.theta))
}

/// The symmetry-reduced block F⁻¹ΛH by explicit triple product.
pub fn block_operator_composed(spec: BlockSpec) -> Result<UnitaryMatrix> {
    let dim = 1usize << spec.n1;
    dense_guard(dim, 1 << 12)?;
    let f_dag = fourier_matrix(spec.n1)?.dagger();
    let h = hadamard_matrix(spec.n1)?;
    // Λ is diagonal, so ΛH is a row rescale.
    let mut lh = h.entries;
    for m in 0..dim {
        let phase = Complex64::from_polar(1.0, spec.theta * m as f64);
        for l in 0..dim {
            lh[[m, l]] *= phase;
        }
    }
    let out = matmul(&f_dag.entries, &lh);
    Ok(UnitaryMatrix::new(
        out,
        format!("FinvLambdaH(theta={},n1={},composed)", spec.theta, spec.n1),
    ))
}

/// The same block by the entrywise product formula: entry (k, l) is
/// (1/2^{n1}) ∏_{m=0}^{n1−1} (1 + (−1)^{b_m} e^{−2πi·k·2^{m−n1}} e^{iθ·2^m})
/// where l = Σ b_m 2^m.
pub fn block_operator_direct(spec: BlockSpec) -> Result<UnitaryMatrix> {
    let dim = 1usize << spec.n1;
    dense_guard(dim, 1 << 14)?;
    let prefactor = 1.0 / dim as f64;
    let mut out = Array2::zeros((dim, dim));
    for k in 0..dim {
        // Phase factors e^{−2πik·2^{m−n1}} e^{iθ·2^m} for each qubit m.
        let factors: Vec<Complex64> = (0..spec.n1)
            .map(|m| {
                let angle = -TAU * k as f64 * (1u64 << m) as f64 / dim as f64
                    + spec.theta * (1u64 << m) as f64;
                Complex64::from_polar(1.0, angle)
            })
            .collect();
        for l in 0..dim {
            let mut acc = Complex64::new(prefactor, 0.0);
            for (m, &f) in factors.iter().enumerate() {
                let sign = if l >> m & 1 == 0 { 1.0 } else { -1.0 };
                acc *= Complex64::new(1.0, 0.0) + sign * f;
            }
            out[[k, l]] = acc;
        }
    }
    Ok(UnitaryMatrix::new(
        out,
        format!("FinvLambdaH(theta={},n1={},direct)", spec.theta, spec.n1),
    ))
}

/// The full operator U = (F⁻¹⊗Id)·U_x·(H⊗Id) restricted to the
/// 2^{n1}·N-dimensional subspace where the second register holds a
/// residue < N. Composite index a·N + b for |a⟩|b⟩.
///
/// Entries come from U[(a,b),(c,d)] = Σ_j F⁻¹[a,j]·H[j,c]·[x^j·d ≡ b],
/// so no dense product over the full dimension is ever formed.
pub fn full_operator_u(shape: RegisterShape) -> Result<UnitaryMatrix> {
    let d1 = shape.first_dim();
    let n = shape.modulus as usize;
    let dim = d1 * n;
    dense_guard(dim, 4096)?;
    let f_dag = fourier_matrix(shape.n1)?.dagger();
    let h = hadamard_matrix(shape.n1)?;
    let mut out = Array2::zeros((dim, dim));
    for j in 0..d1 {
        let xj = mod_exp(shape.base, j as u64, shape.modulus);
        for d in 0..n {
            let b = ((xj as u128 * d as u128) % shape.modulus as u128) as usize;
            for a in 0..d1 {
                let fa = f_dag.entries[[a, j]];
                for c in 0..d1 {
                    out[[a * n + b, c * n + d]] += fa * h.entries[[j, c]];
                }
            }
        }
    }
    Ok(UnitaryMatrix::new(
        out,
        format!("U(n1={},N={},x={})", shape.n1, shape.modulus, shape.base),
    ))
}

/// Eigenvalue multiset of Ũ = (F⁻¹⊗Id)·U_x·(F⊗Id), which equals the
/// spectrum of U_x. Computed exactly from permutation cycle structure:
/// every eigenvalue is a root of unity e^{2πi·p/q}, keyed here by the
/// reduced fraction p/q.
#[derive(Debug, Clone)]
pub struct UtildeSpectrum {
    /// Eigenvalues on the nontrivial sector (second register < N),
    /// keyed by reduced fraction (p, q) meaning e^{2πi·p/q}.
    pub nontrivial: BTreeMap<(u64, u64), usize>,
    /// Multiplicity of eigenvalue 1 contributed by the k ≥ N identity
    /// sector: 2^{n1}·(2^{n2} − N).
    pub trivial_multiplicity: usize,
    pub order: u64,
}

impl UtildeSpectrum {
    pub fn nontrivial_eigenvalues(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for (&(p, q), &mult) in &self.nontrivial {
            let val = Complex64::from_polar(1.0, TAU * p as f64 / q as f64);
            out.extend(std::iter::repeat(val).take(mult));
        }
        out
    }
}

pub fn utilde_eigenvalues(shape: RegisterShape) -> Result<UtildeSpectrum> {
    let decomp = numtheory::orbit_decomposition(shape.base, shape.modulus)?;
    let order = mult_order(shape.base, shape.modulus)?;
    let d1 = shape.first_dim() as u64;
    let mut nontrivial: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for j in 0..d1 {
        for orbit in &decomp.orbits {
            // S^j splits a ρ-cycle into gcd(j, ρ) cycles of length ρ/gcd(j, ρ).
            let rho = orbit.length as u64;
            let g = gcd(j % rho, rho);
            let cycle_len = rho / g;
            for t in 0..cycle_len {
                let d = gcd(t, cycle_len);
                let key = (t / d, cycle_len / d);
                *nontrivial.entry(key).or_insert(0) += g as usize;
            }
        }
    }
    let trivial = shape.first_dim() * (shape.second_dim() - shape.modulus as usize);
    Ok(UtildeSpectrum { nontrivial, trivial_multiplicity: trivial, order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_entry_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        let mut worst = 0.0f64;
        for (x, y) in a.iter().zip(b.iter()) {
            worst = worst.max((x - y).norm());
        }
        worst
    }

    #[test]
    fn fourier_small() {
        let f = fourier_matrix(1).unwrap();
        let h = hadamard_matrix(1).unwrap();
        assert!(max_entry_diff(&f.entries, &h.entries) < 1e-15);
        let f2 = fourier_matrix(2).unwrap();
        assert!((f2.entries[[1, 1]] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        // F * F^dagger = identity
        let prod = f2.matmul(&f2.dagger(), "FFinv");
        let id = UnitaryMatrix::identity(4, "id");
        assert!(max_entry_diff(&prod.entries, &id.entries) < 1e-14);
    }

    #[test]
    fn hadamard_properties() {
        for n1 in 1..=5u32 {
            let h = hadamard_matrix(n1).unwrap();
            let sq = h.matmul(&h, "H^2");
            let id = UnitaryMatrix::identity(h.dim, "id");
            assert!(max_entry_diff(&sq.entries, &id.entries) < 1e-13);
            // column 0 of H = column 0 of F (uniform superposition)
            let f = fourier_matrix(n1).unwrap();
            for k in 0..h.dim {
                assert!((h.entries[[k, 0]] - f.entries[[k, 0]]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn shift_small_permutation() {
        let s = shift_matrix(2, 3, 4).unwrap();
        // 0->0, 1->2, 2->1, 3->3
        for (col, row) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            assert_eq!(s.entries[[row, col]], Complex64::new(1.0, 0.0));
        }
        let ones: usize = s.entries.iter().filter(|e| e.re == 1.0).count();
        assert_eq!(ones, 4);
        let s29 = shift_matrix(2, 29, 32).unwrap();
        assert_eq!(s29.entries[[2, 1]], Complex64::new(1.0, 0.0));
        assert!(shift_matrix(2, 4, 8).is_err());
        assert!(shift_matrix(2, 5, 3).is_err());
    }

    #[test]
    fn shift_periodicity_exact() {
        // S^r = Id_N via integer permutation composition
        for (x, n) in [(2u64, 29u64), (2, 31), (2, 15), (3, 7)] {
            let r = mult_order(x, n).unwrap();
            let mut perm: Vec<u64> = (0..n).collect();
            for _ in 0..r {
                perm = perm.iter().map(|&k| (x * k) % n).collect();
            }
            assert!(perm.iter().enumerate().all(|(i, &p)| i as u64 == p));
        }
    }

    #[test]
    fn mod_exp_operator_blocks() {
        let shape = RegisterShape::new(2, 2, 3, 2).unwrap();
        let op = modular_exponentiation_operator(shape).unwrap();
        let d2 = shape.second_dim();
        // j=0 block is the identity
        for k in 0..d2 {
            assert_eq!(op.image[k], k);
        }
        // j=1 block is the shift
        let s = shift_matrix(2, 3, d2).unwrap();
        for k in 0..d2 {
            let row = op.image[d2 + k] - d2;
            assert_eq!(s.entries[[row, k]], Complex64::new(1.0, 0.0));
        }
        // |3>|1> -> |3>|2> since 2^3 * 1 mod 3 = 2
        assert_eq!(op.image[3 * d2 + 1], 3 * d2 + 2);
        let dense = op.dense().unwrap();
        assert!(dense.unitarity_defect() < 1e-15);
    }

    #[test]
    fn lambda_examples() {
        let id = lambda_matrix(BlockSpec::new(0.0, 3));
        assert!(max_entry_diff(&id.entries, &UnitaryMatrix::identity(8, "id").entries) < 1e-15);
        let m = lambda_matrix(BlockSpec::new(PI, 1));
        assert!((m.entries[[0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m.entries[[1, 1]] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let theta = TAU / 28.0;
        let m = lambda_matrix(BlockSpec::new(theta, 2));
        for k in 0..4 {
            let expect = Complex64::from_polar(1.0, theta * k as f64);
            assert!((m.entries[[k, k]] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn composed_theta0() {
        // n1=1: F=H so F^-1 H = identity
        let b = block_operator_composed(BlockSpec::new(0.0, 1)).unwrap();
        assert!(max_entry_diff(&b.entries, &UnitaryMatrix::identity(2, "id").entries) < 1e-15);
        // any n1: theta=0 equals F^-1 H
        for n1 in 2..=5u32 {
            let b = block_operator_composed(BlockSpec::new(0.0, n1)).unwrap();
            let fh = fourier_matrix(n1).unwrap().dagger().matmul(&hadamard_matrix(n1).unwrap(), "FinvH");
            assert!(max_entry_diff(&b.entries, &fh.entries) < 1e-13);
        }
    }

    #[test]
    fn composed_unitary_n1_10() {
        let b = block_operator_composed(BlockSpec::new(4.0 * PI / 28.0, 10)).unwrap();
        assert!(b.unitarity_defect() < 1e-12);
    }

    #[test]
    fn direct_matches_composed() {
        // fixed grid of specs; the randomized sweep lives in the
        // acceptance suite
        for n1 in 1..=6u32 {
            for k in 0..5u32 {
                let theta = TAU * k as f64 / 7.0;
                let d = block_operator_direct(BlockSpec::new(theta, n1)).unwrap();
                let c = block_operator_composed(BlockSpec::new(theta, n1)).unwrap();
                assert!(max_entry_diff(&d.entries, &c.entries) < 1e-12, "n1={n1} k={k}");
            }
        }
    }

    #[test]
    fn direct_first_entry_theta0() {
        for n1 in 1..=8u32 {
            let d = block_operator_direct(BlockSpec::new(0.0, n1)).unwrap();
            assert!((d.entries[[0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            // row 0 of a unitary with a unit entry vanishes elsewhere
            for l in 1..d.dim {
                assert!(d.entries[[0, l]].norm() < 1e-14);
            }
        }
    }

    #[test]
    fn full_u_commutes_with_shift() {
        for (n1, n) in [(1u32, 3u64), (2, 3), (3, 7), (2, 15), (2, 29)] {
            let shape = RegisterShape::minimal(n1, n, 2).unwrap();
            let u = full_operator_u(shape).unwrap();
            assert!(u.unitarity_defect() < 1e-12);
            let norm = crate::experiment::commutator_norm(&u, shape).unwrap();
            assert!(norm < 1e-12, "n1={n1} N={n}: {norm:e}");
        }
    }

    #[test]
    fn full_u_product_state_eigenrelation() {
        // |phi_l>|s_j> built from block and shift eigenvectors is an
        // eigenstate of the full U with eigenvalue e^{i alpha_l}
        let shape = RegisterShape::minimal(3, 7, 2).unwrap();
        let u = full_operator_u(shape).unwrap();
        let decomp = crate::numtheory::orbit_decomposition(2, 7).unwrap();
        let pairs = crate::shift_spectrum::shift_eigenbasis(&decomp, 7).unwrap();
        let n = 7usize;
        let d1 = shape.first_dim();
        for pair in &pairs {
            let block = block_operator_composed(BlockSpec::new(pair.theta, shape.n1)).unwrap();
            let spec = crate::spectral_stats::eigendecompose_labelled(&block, pair.theta).unwrap();
            for l in 0..d1 {
                let lam = Complex64::from_polar(1.0, spec.eigenangles[l]);
                // product state and residual
                let mut worst = 0.0f64;
                for row in 0..d1 * n {
                    let mut uv = Complex64::new(0.0, 0.0);
                    for a in 0..d1 {
                        for b in 0..n {
                            uv += u.entries[[row, a * n + b]]
                                * spec.eigenvectors[[a, l]]
                                * pair.vector[b];
                        }
                    }
                    let v = spec.eigenvectors[[row / n, l]] * pair.vector[row % n];
                    worst = worst.max((uv - lam * v).norm());
                }
                assert!(worst < 1e-10, "theta={} l={l}: {worst:e}", pair.theta);
            }
        }
    }

    #[test]
    fn utilde_small_case() {
        let shape = RegisterShape::new(1, 2, 3, 2).unwrap();
        let spec = utilde_eigenvalues(shape).unwrap();
        // j=0 gives {1,1,1}; j=1 gives {1, 1, -1}
        assert_eq!(spec.nontrivial.get(&(0, 1)), Some(&5));
        assert_eq!(spec.nontrivial.get(&(1, 2)), Some(&1));
        assert_eq!(spec.nontrivial.len(), 2);
        // identity sector: 2 * (4 - 3) = 2
        assert_eq!(spec.trivial_multiplicity, 2);
    }

    #[test]
    fn utilde_roots_of_unity() {
        for (n1, n) in [(2u32, 31u64), (3, 29), (2, 15)] {
            let shape = RegisterShape::minimal(n1, n, 2).unwrap();
            let spec = utilde_eigenvalues(shape).unwrap();
            let total: usize = spec.nontrivial.values().sum();
            assert_eq!(total, shape.first_dim() * n as usize);
            for &(_, q) in spec.nontrivial.keys() {
                assert_eq!(spec.order % q, 0, "denominator {q} must divide the order");
            }
            // eigenvalue 1 appears at least once per j-block (fixed point 0)
            assert!(spec.nontrivial[&(0, 1)] >= shape.first_dim());
        }
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert_eq!(normalize_angle(TAU), 0.0);
        assert!((normalize_angle(-20.0 * PI / 28.0) - 36.0 * PI / 28.0).abs() < 1e-12);
        assert_eq!(normalize_angle(TAU - 1e-14), 0.0);
    }

    #[test]
    fn guards_respect_env_override() {
        assert!(matches!(
            full_operator_u(RegisterShape::minimal(10, 29, 2).unwrap()),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}
