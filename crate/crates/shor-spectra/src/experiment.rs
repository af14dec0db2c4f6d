//! End-to-end experiment orchestration: builds the requested blocks,
//! diagonalizes them, pools the spacing statistics, writes CSV/JSON
//! artifacts plus a gnuplot script, and runs the cross-check battery.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{self, ThetaSpec, PAPER_THETAS};
use crate::numtheory::orbit_decomposition;
use crate::operators::{
    block_operator_composed, block_operator_direct, full_operator_u, normalize_angle,
    utilde_eigenvalues, BlockSpec, RegisterShape, UnitaryMatrix, TAU,
};
use crate::shift_spectrum::{distinct_eigenangles, shift_eigenbasis, EigenangleClass};
use crate::spectral_stats::{
    cumulative_distribution, eigendecompose_labelled, histogram, intensity_record, ks_distance,
    normalized_spacings, poisson_cdf, pool_ensemble, wigner_cue_cdf, wigner_cue_pdf,
    wigner_goe_cdf, BlockSpectrum,
};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n1: u32,
    pub modulus: u64,
    pub base: u64,
    pub thetas: ThetaSpec,
    pub bin_width: f64,
    pub include_wraparound: bool,
    pub output_dir: PathBuf,
    /// Eigenstate selector for the intensity figures: index within the
    /// first theta block, by sorted eigenangle.
    pub eigenstate_index: usize,
}

impl ExperimentConfig {
    pub fn paper_defaults(output_dir: PathBuf) -> Self {
        Self {
            n1: 10,
            modulus: 29,
            base: 2,
            thetas: ThetaSpec::Paper,
            bin_width: 0.25,
            include_wraparound: false,
            output_dir,
            // index 0 by sorted eigenangle is always the uniform
            // superposition u (H·u = |0⟩, Λ|0⟩ = |0⟩, F⁻¹|0⟩ = u), an
            // exact eigenvector with eigenvalue 1 and flat intensities;
            // index 1 is the first generic eigenstate.
            eigenstate_index: 1,
        }
    }

    /// Resolve the theta selector into concrete angles, each validated
    /// against the shift operator's eigenangles.
    pub fn resolve_thetas(&self) -> Result<Vec<f64>> {
        let decomp = orbit_decomposition(self.base, self.modulus)?;
        let classes = distinct_eigenangles(&decomp);
        let resolved: Vec<f64> = match &self.thetas {
            ThetaSpec::All => classes.iter().map(|c| c.theta).collect(),
            ThetaSpec::Seeds => {
                // One angle per orbit: the fundamental 2π/ρ harmonic.
                decomp
                    .orbits
                    .iter()
                    .map(|o| normalize_angle(TAU / o.length as f64))
                    .collect()
            }
            ThetaSpec::Paper => PAPER_THETAS.iter().map(|f| f.angle()).collect(),
            ThetaSpec::Explicit(fractions) => fractions.iter().map(|f| f.angle()).collect(),
        };
        for &theta in &resolved {
            validate_theta(theta, &classes)?;
        }
        Ok(resolved)
    }
}

fn validate_theta(theta: f64, classes: &[EigenangleClass]) -> Result<()> {
    let nearest = classes
        .iter()
        .map(|c| c.theta)
        .min_by(|a, b| {
            circle_distance(*a, theta)
                .partial_cmp(&circle_distance(*b, theta))
                .unwrap()
        })
        .unwrap_or(0.0);
    if circle_distance(nearest, theta) < 1e-12 {
        Ok(())
    } else {
        Err(Error::InvalidTheta { theta, nearest })
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TAU;
    d.min(TAU - d)
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub theta: f64,
    pub residual: f64,
    pub degeneracies: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KsReport {
    pub cue: f64,
    pub goe: f64,
    pub poisson: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportParams {
    pub n1: u32,
    #[serde(rename = "N")]
    pub modulus: u64,
    pub x: u64,
    pub thetas: Vec<f64>,
}

/// Serializable bundle of everything one run produced.
#[derive(Debug, Clone, Serialize, Default)]
pub struct ExperimentReport {
    pub params: Option<ReportParams>,
    pub spacing_count: usize,
    pub blocks: Vec<BlockReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<KsReport>,
    /// Pooled spacing mean before the global unit-mean rescale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pre_normalization_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intensity_ks_exponential: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenstate: Option<(f64, usize)>,
    pub residual_max: f64,
    pub degeneracies: usize,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn diagonalize_blocks(config: &ExperimentConfig, thetas: &[f64]) -> Result<Vec<BlockSpectrum>> {
    thetas
        .iter()
        .map(|&theta| {
            let block = block_operator_direct(BlockSpec::new(theta, config.n1))?;
            eigendecompose_labelled(&block, theta)
        })
        .collect()
}

fn float(v: f64) -> String {
    // shortest round-trip formatting; deterministic for a given value
    format!("{v}")
}

/// Spacing-distribution experiment: builds the configured blocks,
/// pools unfolded spacings, and writes the histogram against the three
/// reference spacing laws.
pub fn run_fig1(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let thetas = config.resolve_thetas()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let spectra = diagonalize_blocks(config, &thetas)?;

    let lists: Vec<Vec<f64>> = spectra
        .iter()
        .map(|s| normalized_spacings(s, config.include_wraparound))
        .collect::<Result<_>>()?;
    let ensemble = pool_ensemble(&lists);

    let ks = KsReport {
        cue: ks_distance(&ensemble.spacings, |s| wigner_cue_cdf(s).unwrap()),
        goe: ks_distance(&ensemble.spacings, |s| wigner_goe_cdf(s).unwrap()),
        poisson: ks_distance(&ensemble.spacings, |s| poisson_cdf(s).unwrap()),
    };

    let max_s = 4.0;
    let hist = histogram(&ensemble.spacings, config.bin_width, max_s)?;

    let mut files = Vec::new();
    let dir = &config.output_dir;

    let spacing_rows: Vec<String> = ensemble.spacings.iter().map(|&s| float(s)).collect();
    files.push(write_artifact(dir, "spacings.csv", "s", &spacing_rows)?);

    let hist_rows: Vec<String> = hist
        .bins
        .iter()
        .map(|&(c, d)| format!("{},{}", float(c), float(d)))
        .collect();
    files.push(write_artifact(dir, "histogram.csv", "bin_center,density", &hist_rows)?);

    let curve_rows: Vec<String> = (0..=400)
        .map(|i| {
            let s = i as f64 * max_s / 400.0;
            format!(
                "{},{},{},{}",
                float(s),
                float(wigner_cue_pdf(s).unwrap()),
                float(crate::spectral_stats::wigner_goe_pdf(s).unwrap()),
                float(crate::spectral_stats::poisson_pdf(s).unwrap())
            )
        })
        .collect();
    files.push(write_artifact(dir, "reference_pdfs.csv", "s,cue,goe,poisson", &curve_rows)?);

    files.push(write_fig1_plot_script(dir)?);

    let mut report = base_report(config, &thetas, &spectra);
    report.spacing_count = ensemble.raw_count;
    report.ks = Some(ks);
    report.pre_normalization_mean = Some(ensemble.pre_normalization_mean);
    report.files = files;
    write_report(dir, "fig1_report.json", &mut report)?;
    Ok(report)
}

/// Eigenvector intensity experiment: intensities of one block eigenstate
/// and their cumulative distribution against 1 − e^{−x}.
pub fn run_fig23(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let thetas = config.resolve_thetas()?;
    if thetas.is_empty() {
        return Err(Error::Config("at least one theta required".into()));
    }
    std::fs::create_dir_all(&config.output_dir)?;
    // Figs. 2 and 3 use a single eigenstate of the first theta block.
    let spectra = diagonalize_blocks(config, &thetas[..1])?;
    let spectrum = &spectra[0];
    let record = intensity_record(spectrum, config.eigenstate_index)?;
    let xi = cumulative_distribution(&record);
    let intensity_ks = ks_distance(&record.intensities, |x| 1.0 - (-x).exp());

    let mut files = Vec::new();
    let dir = &config.output_dir;

    let intensity_rows: Vec<String> = record
        .intensities
        .iter()
        .enumerate()
        .map(|(m, &x)| format!("{m},{}", float(x)))
        .collect();
    files.push(write_artifact(dir, "intensities.csv", "m,x", &intensity_rows)?);

    let xi_rows: Vec<String> = xi
        .iter()
        .map(|&(x, v)| format!("{},{}", float(x), float(v)))
        .collect();
    files.push(write_artifact(dir, "cumulative.csv", "x,xi", &xi_rows)?);

    let ref_rows: Vec<String> = (0..=400)
        .map(|i| {
            let x = i as f64 * 8.0 / 400.0;
            format!("{},{}", float(x), float(1.0 - (-x).exp()))
        })
        .collect();
    files.push(write_artifact(dir, "exponential_cdf.csv", "x,xi", &ref_rows)?);

    files.push(write_fig23_plot_script(dir)?);

    let mut report = base_report(config, &thetas, &spectra);
    report.spacing_count = 0;
    report.intensity_ks_exponential = Some(intensity_ks);
    report.eigenstate = Some(record.state_label);
    report.files = files;
    write_report(dir, "fig23_report.json", &mut report)?;
    Ok(report)
}

fn base_report(
    config: &ExperimentConfig,
    thetas: &[f64],
    spectra: &[BlockSpectrum],
) -> ExperimentReport {
    let blocks: Vec<BlockReport> = spectra
        .iter()
        .map(|s| BlockReport {
            theta: s.theta,
            residual: s.residual,
            degeneracies: s.degeneracy_count(),
        })
        .collect();
    ExperimentReport {
        params: Some(ReportParams {
            n1: config.n1,
            modulus: config.modulus,
            x: config.base,
            thetas: thetas.to_vec(),
        }),
        residual_max: blocks.iter().map(|b| b.residual).fold(0.0, f64::max),
        degeneracies: blocks.iter().map(|b| b.degeneracies).sum(),
        blocks,
        ..Default::default()
    }
}

fn write_artifact(dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<String> {
    let path = dir.join(name);
    io::write_csv(&path, header, rows)?;
    Ok(name.to_string())
}

fn write_report(dir: &Path, name: &str, report: &mut ExperimentReport) -> Result<()> {
    report.files.push(name.to_string());
    let mut f = std::fs::File::create(dir.join(name))?;
    serde_json::to_writer_pretty(&mut f, report)?;
    writeln!(f)?;
    Ok(())
}

fn write_fig1_plot_script(dir: &Path) -> Result<String> {
    let script = "\
set datafile separator ','
set xlabel 's'
set ylabel 'p(s)'
set xrange [0:4]
plot 'histogram.csv' using 1:2 skip 1 with boxes title 'spacings', \\
     'reference_pdfs.csv' using 1:2 skip 1 with lines title 'CUE', \\
     'reference_pdfs.csv' using 1:3 skip 1 with lines dashtype 2 title 'GOE', \\
     'reference_pdfs.csv' using 1:4 skip 1 with lines dashtype 3 title 'Poisson'
pause -1
";
    std::fs::write(dir.join("fig1.gnuplot"), script)?;
    Ok("fig1.gnuplot".to_string())
}

fn write_fig23_plot_script(dir: &Path) -> Result<String> {
    let script = "\
set datafile separator ','
set xlabel 'x'
set ylabel 'xi(x)'
plot 'cumulative.csv' using 1:2 skip 1 with steps title 'empirical', \\
     'exponential_cdf.csv' using 1:2 skip 1 with lines title '1-exp(-x)'
pause -1
";
    std::fs::write(dir.join("fig23.gnuplot"), script)?;
    Ok("fig23.gnuplot".to_string())
}

/// Cross-check battery on a small shape: commutator symmetry, full
/// spectrum vs block spectra, direct vs composed block construction,
/// shift eigenbasis residuals, and the cycle-structure spectrum of Ũ.
pub fn run_verify(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let shape = RegisterShape::minimal(config.n1, config.modulus, config.base)?;
    let dim = shape.first_dim() * config.modulus as usize;
    if dim > 4096 {
        return Err(Error::DimensionTooLarge { dim, guard: 4096 });
    }
    let mut checks = Vec::new();

    // [U, Id x S] = 0 on the restricted space
    let u = full_operator_u(shape)?;
    checks.push(check("commutator_max", commutator_norm(&u, shape)?, 1e-12));

    // block spectra with S-multiplicities reproduce the full spectrum
    checks.push(check(
        "block_vs_full_spectrum",
        block_spectrum_mismatch(&u, shape)?,
        1e-8,
    ));

    // direct product formula vs composed triple product
    let mut direct_defect = 0.0f64;
    let decomp = orbit_decomposition(shape.base, shape.modulus)?;
    for class in distinct_eigenangles(&decomp) {
        let spec = BlockSpec::new(class.theta, shape.n1);
        let d = block_operator_direct(spec)?;
        let c = block_operator_composed(spec)?;
        for k in 0..d.dim {
            for l in 0..d.dim {
                direct_defect = direct_defect.max((d.entries[[k, l]] - c.entries[[k, l]]).norm());
            }
        }
    }
    checks.push(check("direct_vs_composed", direct_defect, 1e-12));

    // shift eigenbasis residuals
    let pairs = shift_eigenbasis(&decomp, shape.modulus as usize)?;
    let s = crate::operators::shift_matrix(shape.base, shape.modulus, shape.modulus as usize)?;
    let mut shift_residual = 0.0f64;
    for p in &pairs {
        let lam = Complex64::from_polar(1.0, p.theta);
        let mut norm2 = 0.0;
        for row in 0..p.vector.len() {
            let mut sv = Complex64::new(0.0, 0.0);
            for col in 0..p.vector.len() {
                sv += s.entries[[row, col]] * p.vector[col];
            }
            norm2 += (sv - lam * p.vector[row]).norm_sqr();
        }
        shift_residual = shift_residual.max(norm2.sqrt());
    }
    checks.push(check("shift_eigenbasis_residual", shift_residual, 1e-12));

    // cycle-structure spectrum of U_x (= spectrum of Utilde)
    checks.push(check(
        "utilde_cycle_spectrum",
        utilde_spectrum_mismatch(shape)?,
        1e-8,
    ));

    let mut report = ExperimentReport {
        params: Some(ReportParams {
            n1: config.n1,
            modulus: config.modulus,
            x: config.base,
            thetas: vec![],
        }),
        checks,
        ..Default::default()
    };
    report.residual_max = report
        .checks
        .iter()
        .map(|c| c.margin)
        .fold(0.0, f64::max);
    if !config.output_dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&config.output_dir)?;
        write_report(&config.output_dir, "verify_report.json", &mut report)?;
    }
    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} margin {:e} > {:e}", c.name, c.margin, c.tolerance))
        .collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(Error::VerificationFailure(failed))
    }
}

fn check(name: &str, margin: f64, tolerance: f64) -> CheckResult {
    CheckResult { name: name.to_string(), margin, tolerance, passed: margin < tolerance }
}

/// Max entry of U·(Id⊗S) − (Id⊗S)·U on the restricted space. Id⊗S is a
/// permutation, so both products are column/row permutations of U.
pub fn commutator_norm(u: &UnitaryMatrix, shape: RegisterShape) -> Result<f64> {
    let n = shape.modulus as usize;
    let d1 = shape.first_dim();
    let image: Vec<usize> = (0..n)
        .map(|k| ((shape.base as u128 * k as u128) % shape.modulus as u128) as usize)
        .collect();
    let dim = d1 * n;
    let mut worst = 0.0f64;
    for row in 0..dim {
        let (ra, rb) = (row / n, row % n);
        for col in 0..dim {
            let (ca, cb) = (col / n, col % n);
            // (U·(Id⊗S))[row, col] = U[row, ca·n + image[cb]]
            let us = u.entries[[row, ca * n + image[cb]]];
            // ((Id⊗S)·U)[row, col] = U[ra·n + preimage(rb), col]
            let pre = image.iter().position(|&i| i == rb).unwrap();
            let su = u.entries[[ra * n + pre, col]];
            worst = worst.max((us - su).norm());
        }
    }
    Ok(worst)
}

/// Sorted-eigenangle mismatch between the spectrum of the full operator
/// and the multiset union of block spectra weighted by shift-eigenangle
/// multiplicities.
pub fn block_spectrum_mismatch(u: &UnitaryMatrix, shape: RegisterShape) -> Result<f64> {
    let full = eigendecompose_labelled(u, f64::NAN)?;
    let decomp = orbit_decomposition(shape.base, shape.modulus)?;
    let mut pooled: Vec<f64> = Vec::with_capacity(u.dim);
    for class in distinct_eigenangles(&decomp) {
        let block = block_operator_composed(BlockSpec::new(class.theta, shape.n1))?;
        let spec = eigendecompose_labelled(&block, class.theta)?;
        for &angle in &spec.eigenangles {
            for _ in 0..class.multiplicity {
                pooled.push(angle);
            }
        }
    }
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if pooled.len() != full.eigenangles.len() {
        return Ok(f64::INFINITY);
    }
    let mismatch = full
        .eigenangles
        .iter()
        .zip(&pooled)
        .map(|(&a, &b)| {
            // compare on the circle so branch-cut straddlers don't blow up
            (Complex64::from_polar(1.0, a) - Complex64::from_polar(1.0, b)).norm()
        })
        .fold(0.0f64, f64::max);
    Ok(mismatch)
}

/// Compare the cycle-structure eigenvalues of U_x against a dense
/// diagonalization of the restricted U_x permutation.
fn utilde_spectrum_mismatch(shape: RegisterShape) -> Result<f64> {
    let spectrum = utilde_eigenvalues(shape)?;
    let n = shape.modulus as usize;
    let d1 = shape.first_dim();
    let dim = d1 * n;
    if dim > 4096 {
        return Err(Error::DimensionTooLarge { dim, guard: 4096 });
    }
    // dense restricted U_x
    let mut m = ndarray::Array2::zeros((dim, dim));
    for j in 0..d1 {
        let xj = crate::numtheory::mod_exp(shape.base, j as u64, shape.modulus);
        for k in 0..n {
            let target = ((xj as u128 * k as u128) % shape.modulus as u128) as usize;
            m[[j * n + target, j * n + k]] = Complex64::new(1.0, 0.0);
        }
    }
    let dense = eigendecompose_labelled(&UnitaryMatrix::new(m, "U_x restricted"), f64::NAN)?;
    let mut predicted: Vec<f64> = spectrum
        .nontrivial_eigenvalues()
        .iter()
        .map(|v| normalize_angle(v.arg()))
        .collect();
    predicted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if predicted.len() != dense.eigenangles.len() {
        return Ok(f64::INFINITY);
    }
    Ok(dense
        .eigenangles
        .iter()
        .zip(&predicted)
        .map(|(&a, &b)| (Complex64::from_polar(1.0, a) - Complex64::from_polar(1.0, b)).norm())
        .fold(0.0f64, f64::max))
}

/// JSON payload for the `orbits` subcommand.
pub fn orbits_json(base: u64, modulus: u64) -> Result<String> {
    let decomp = orbit_decomposition(base, modulus)?;
    Ok(serde_json::to_string_pretty(&decomp)?)
}

/// JSON payload for the `shift-spectrum` subcommand.
pub fn shift_spectrum_json(base: u64, modulus: u64) -> Result<String> {
    let decomp = orbit_decomposition(base, modulus)?;
    let classes = distinct_eigenangles(&decomp);
    Ok(serde_json::to_string_pretty(&classes)?)
}

/// CSV payload for the `thue-morse` subcommand: k, re, im, intensity.
pub fn thue_morse_csv(n1: u32) -> Result<String> {
    let col = crate::structure_analysis::tm_fourier_column(n1)?;
    let dim = col.len() as f64;
    let mut out = String::from("k,re,im,intensity\n");
    for (k, c) in col.iter().enumerate() {
        out.push_str(&format!("{k},{},{},{}\n", c.re, c.im, dim * c.norm_sqr()));
    }
    Ok(out)
}

/// Degeneracy table of the Ũ spectrum for reporting: (p, q, multiplicity)
/// meaning eigenvalue e^{2πip/q}.
pub fn utilde_table(shape: RegisterShape) -> Result<BTreeMap<(u64, u64), usize>> {
    Ok(utilde_eigenvalues(shape)?.nontrivial)
}
