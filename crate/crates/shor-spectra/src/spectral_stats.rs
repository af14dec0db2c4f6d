//! Dense eigendecomposition of the block unitaries and the statistical
//! battery run on their spectra: unfolded nearest-neighbor spacings
//! against the CUE Wigner surmise, and eigenvector intensity statistics
//! against the exponential law.

use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;
use num_complex::Complex64;
use serde::Serialize;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::operators::{UnitaryMatrix, TAU};

use std::f64::consts::PI;

/// Complete eigensystem of one block unitary, sorted by eigenangle.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    /// The shift eigenangle labelling the block.
    pub theta: f64,
    /// Eigenangles in [0, 2π), ascending.
    pub eigenangles: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `eigenangles`.
    pub eigenvectors: Array2<Complex64>,
    /// Max over pairs of the 2-norm residual ‖Mv − e^{iα}v‖.
    pub residual: f64,
}

impl BlockSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenangles.len()
    }

    /// Count of exactly-coincident (within 1e-12) adjacent eigenangles.
    pub fn degeneracy_count(&self) -> usize {
        self.eigenangles
            .windows(2)
            .filter(|w| (w[1] - w[0]).abs() < 1e-12)
            .count()
    }
}

/// Map arg to [0, 2π) with ties at 2π snapped to 0.
fn eigenangle(val: Complex64) -> f64 {
    crate::operators::normalize_angle(val.arg())
}

/// Diagonalize a unitary matrix, returning a complete orthonormal
/// eigensystem sorted by eigenangle. The matrix is normal, so a full
/// orthonormal basis exists; vectors inside numerically degenerate
/// eigenangle clusters are re-orthonormalized, and every vector's phase
/// is gauged so its first significant component is real positive.
pub fn eigendecompose_unitary(m: &UnitaryMatrix) -> Result<BlockSpectrum> {
    eigendecompose_labelled(m, f64::NAN)
}

pub fn eigendecompose_labelled(m: &UnitaryMatrix, theta_label: f64) -> Result<BlockSpectrum> {
    let dim = m.dim;
    if dim > 4096 {
        return Err(Error::DimensionTooLarge { dim, guard: 4096 });
    }
    let defect = m.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::NotUnitary { deviation: defect });
    }
    let (vals, vecs): (Array1<Complex64>, Array2<Complex64>) = m
        .entries
        .eig()
        .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;

    let mut order: Vec<usize> = (0..dim).collect();
    let angles: Vec<f64> = vals.iter().map(|&v| eigenangle(v)).collect();
    order.sort_by(|&a, &b| angles[a].partial_cmp(&angles[b]).unwrap());

    let mut eigenangles = Vec::with_capacity(dim);
    let mut sorted = Array2::zeros((dim, dim));
    for (out_col, &src) in order.iter().enumerate() {
        eigenangles.push(angles[src]);
        for row in 0..dim {
            sorted[[row, out_col]] = vecs[[row, src]];
        }
    }

    reorthonormalize_clusters(&eigenangles, &mut sorted);
    gauge_phases(&mut sorted);

    let residual = max_residual(&m.entries, &eigenangles, &sorted);
    Ok(BlockSpectrum { theta: theta_label, eigenangles, eigenvectors: sorted, residual })
}

const CLUSTER_GAP: f64 = 1e-9;

/// QR-orthonormalize runs of eigenvectors whose eigenangles coincide to
/// within CLUSTER_GAP. For a normal matrix the cluster spans an invariant
/// subspace, so this preserves the eigen-relation to solver accuracy.
fn reorthonormalize_clusters(angles: &[f64], vecs: &mut Array2<Complex64>) {
    let dim = angles.len();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && angles[end] - angles[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(vecs, start, end);
        }
        start = end;
    }
}

fn gram_schmidt(vecs: &mut Array2<Complex64>, start: usize, end: usize) {
    let dim = vecs.nrows();
    for col in start..end {
        for prev in start..col {
            let mut dot = Complex64::new(0.0, 0.0);
            for row in 0..dim {
                dot += vecs[[row, prev]].conj() * vecs[[row, col]];
            }
            for row in 0..dim {
                let sub = dot * vecs[[row, prev]];
                vecs[[row, col]] -= sub;
            }
        }
        let norm: f64 = (0..dim).map(|r| vecs[[r, col]].norm_sqr()).sum::<f64>().sqrt();
        for row in 0..dim {
            vecs[[row, col]] /= norm;
        }
    }
}

/// Make the first component with modulus above 1e-12 real positive.
fn gauge_phases(vecs: &mut Array2<Complex64>) {
    let (dim, cols) = (vecs.nrows(), vecs.ncols());
    for col in 0..cols {
        let pivot = (0..dim).find(|&r| vecs[[r, col]].norm() > 1e-12);
        if let Some(r) = pivot {
            let phase = vecs[[r, col]] / vecs[[r, col]].norm();
            let correction = phase.conj();
            for row in 0..dim {
                vecs[[row, col]] *= correction;
            }
        }
    }
}

fn max_residual(m: &Array2<Complex64>, angles: &[f64], vecs: &Array2<Complex64>) -> f64 {
    let dim = angles.len();
    let mut worst = 0.0f64;
    let product = crate::operators::matmul(m, &vecs.to_owned());
    for (col, &angle) in angles.iter().enumerate() {
        let lam = Complex64::from_polar(1.0, angle);
        let mut norm2 = 0.0;
        for row in 0..dim {
            norm2 += (product[[row, col]] - lam * vecs[[row, col]]).norm_sqr();
        }
        worst = worst.max(norm2.sqrt());
    }
    worst
}

/// Consecutive eigenangle differences scaled by dim/(2π) so the mean
/// spacing is (close to) unity. With wrap-around included the extra
/// spacing closes the circle and the per-block mean is exactly 1.
pub fn normalized_spacings(spectrum: &BlockSpectrum, include_wraparound: bool) -> Result<Vec<f64>> {
    let dim = spectrum.dim();
    if dim == 0 {
        return Err(Error::EmptySpectrum);
    }
    let scale = dim as f64 / TAU;
    let mut out: Vec<f64> = spectrum
        .eigenangles
        .windows(2)
        .map(|w| (w[1] - w[0]) * scale)
        .collect();
    if include_wraparound && dim > 1 {
        let wrap = spectrum.eigenangles[0] + TAU - spectrum.eigenangles[dim - 1];
        out.push(wrap * scale);
    }
    Ok(out)
}

/// Pooled spacing ensemble, globally rescaled to unit mean.
#[derive(Debug, Clone, Serialize)]
pub struct SpacingEnsemble {
    pub spacings: Vec<f64>,
    pub source_count: usize,
    pub raw_count: usize,
    /// Mean before the global rescale; the rescale divides by this.
    pub pre_normalization_mean: f64,
}

pub fn pool_ensemble(spacing_lists: &[Vec<f64>]) -> SpacingEnsemble {
    let mut spacings: Vec<f64> = spacing_lists.iter().flatten().copied().collect();
    let raw_count = spacings.len();
    let mean = spacings.iter().sum::<f64>() / raw_count as f64;
    for s in &mut spacings {
        *s /= mean;
    }
    SpacingEnsemble {
        spacings,
        source_count: spacing_lists.len(),
        raw_count,
        pre_normalization_mean: mean,
    }
}

fn check_nonnegative(s: f64) -> Result<()> {
    if s < 0.0 {
        return Err(Error::DomainError(format!("spacing {s} is negative")));
    }
    Ok(())
}

/// CUE Wigner surmise density p(s) = (32 s²/π²) e^{−4s²/π}.
pub fn wigner_cue_pdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok(32.0 * s * s / (PI * PI) * (-4.0 * s * s / PI).exp())
}

/// Antiderivative of the CUE surmise:
/// P(s) = erf(2s/√π) − (4s/π) e^{−4s²/π}.
pub fn wigner_cue_cdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok(erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp())
}

/// Poisson (uncorrelated-spectrum) spacing density e^{−s}.
pub fn poisson_pdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok((-s).exp())
}

pub fn poisson_cdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok(1.0 - (-s).exp())
}

/// GOE Wigner surmise density (πs/2) e^{−πs²/4}.
pub fn wigner_goe_pdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok(PI * s / 2.0 * (-PI * s * s / 4.0).exp())
}

pub fn wigner_goe_cdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok(1.0 - (-PI * s * s / 4.0).exp())
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of
/// `samples` and a reference CDF, evaluated at both sides of each step.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max(((i as f64 + 1.0) / n - f).abs());
        worst = worst.max((i as f64 / n - f).abs());
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    /// (bin_center, density) with density = count/(n·bin_width).
    pub bins: Vec<(f64, f64)>,
    pub bin_width: f64,
    /// Samples at or beyond max_s, excluded from the bins.
    pub overflow: usize,
    pub total: usize,
}

pub fn histogram(samples: &[f64], bin_width: f64, max_s: f64) -> Result<Histogram> {
    if bin_width <= 0.0 {
        return Err(Error::DomainError(format!("bin width {bin_width} must be positive")));
    }
    let nbins = (max_s / bin_width).round() as usize;
    let mut counts = vec![0usize; nbins];
    let mut overflow = 0usize;
    for &s in samples {
        let idx = (s / bin_width).floor() as isize;
        if idx >= 0 && (idx as usize) < nbins {
            counts[idx as usize] += 1;
        } else {
            overflow += 1;
        }
    }
    let n = samples.len() as f64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| ((i as f64 + 0.5) * bin_width, c as f64 / (n * bin_width)))
        .collect();
    Ok(Histogram { bins, bin_width, overflow, total: samples.len() })
}

/// Normalized eigenvector intensities x_m = dim·|⟨m|φ⟩|², mean 1 for a
/// unit-norm eigenvector.
#[derive(Debug, Clone, Serialize)]
pub struct IntensityRecord {
    pub intensities: Vec<f64>,
    /// (block theta, eigenstate index by sorted eigenangle).
    pub state_label: (f64, usize),
}

pub fn intensity_record(spectrum: &BlockSpectrum, index: usize) -> Result<IntensityRecord> {
    let dim = spectrum.dim();
    if index >= dim {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    let intensities = (0..dim)
        .map(|m| dim as f64 * spectrum.eigenvectors[[m, index]].norm_sqr())
        .collect();
    Ok(IntensityRecord { intensities, state_label: (spectrum.theta, index) })
}

/// Empirical cumulative distribution ξ(x) sampled at the sorted
/// intensities.
pub fn cumulative_distribution(record: &IntensityRecord) -> Vec<(f64, f64)> {
    let mut xs = record.intensities.clone();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x, (i as f64 + 1.0) / n))
        .collect()
}
