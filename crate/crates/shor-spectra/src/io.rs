//! File formats: the binary matrix dump with JSON sidecar, CSV writers,
//! and parsing of the `--thetas` flag.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{normalize_angle, UnitaryMatrix, TAU};

/// Sidecar metadata written next to a matrix dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DumpSidecar {
    pub label: String,
    pub dim: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<u32>,
}

/// Serialize a matrix to the dump format: header {dim: u64 LE} followed
/// by dim² complex entries as LE f64 (re, im) pairs, row-major.
pub fn encode_matrix_dump(m: &UnitaryMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 16 * m.dim * m.dim);
    out.extend_from_slice(&(m.dim as u64).to_le_bytes());
    for row in 0..m.dim {
        for col in 0..m.dim {
            let e = m.entries[[row, col]];
            out.extend_from_slice(&e.re.to_le_bytes());
            out.extend_from_slice(&e.im.to_le_bytes());
        }
    }
    out
}

/// Largest dim accepted when decoding a dump (untrusted input guard).
const MAX_DECODE_DIM: u64 = 1 << 13;

/// Decode a matrix dump. Rejects truncated or oversized input before
/// allocating.
pub fn decode_matrix_dump(bytes: &[u8]) -> Result<Array2<Complex64>> {
    if bytes.len() < 8 {
        return Err(Error::MalformedDump("shorter than the 8-byte header".into()));
    }
    let dim = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    if dim == 0 || dim > MAX_DECODE_DIM {
        return Err(Error::MalformedDump(format!("dimension {dim} out of range")));
    }
    let expected = 8 + 16 * (dim * dim) as usize;
    if bytes.len() != expected {
        return Err(Error::MalformedDump(format!(
            "expected {expected} bytes for dim {dim}, got {}",
            bytes.len()
        )));
    }
    let dim = dim as usize;
    let mut out = Array2::zeros((dim, dim));
    let mut offset = 8;
    for row in 0..dim {
        for col in 0..dim {
            let re = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[offset + 8..offset + 16].try_into().unwrap());
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::MalformedDump(format!(
                    "non-finite entry at ({row}, {col})"
                )));
            }
            out[[row, col]] = Complex64::new(re, im);
            offset += 16;
        }
    }
    Ok(out)
}

pub fn write_matrix_dump(
    path: &Path,
    m: &UnitaryMatrix,
    theta: Option<f64>,
    n1: Option<u32>,
) -> Result<()> {
    std::fs::write(path, encode_matrix_dump(m))?;
    let sidecar = DumpSidecar { label: m.label.clone(), dim: m.dim as u64, theta, n1 };
    let json_path = path.with_extension("json");
    let mut f = std::fs::File::create(json_path)?;
    serde_json::to_writer_pretty(&mut f, &sidecar)?;
    writeln!(f)?;
    Ok(())
}

pub fn read_matrix_dump(path: &Path) -> Result<Array2<Complex64>> {
    decode_matrix_dump(&std::fs::read(path)?)
}

/// The `--thetas` flag: `paper` for the five published angles, `all` for
/// every distinct shift eigenangle, `seeds` for the seed-1 orbit's
/// angles, or a comma-separated list of signed rationals `p/q` meaning
/// the angle 2πp/q.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSpec {
    Paper,
    All,
    Seeds,
    Explicit(Vec<ThetaFraction>),
}

/// A signed fraction p/q of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaFraction {
    pub numer: i64,
    pub denom: u64,
}

impl ThetaFraction {
    pub fn angle(&self) -> f64 {
        normalize_angle(TAU * self.numer as f64 / self.denom as f64)
    }
}

/// The five angles used for the published spacing ensemble, as fractions
/// of a full turn: −20π/28, 0, 4π/28, 6π/28, 14π/28.
pub const PAPER_THETAS: [ThetaFraction; 5] = [
    ThetaFraction { numer: -10, denom: 28 },
    ThetaFraction { numer: 0, denom: 28 },
    ThetaFraction { numer: 2, denom: 28 },
    ThetaFraction { numer: 3, denom: 28 },
    ThetaFraction { numer: 7, denom: 28 },
];

pub fn parse_theta_spec(input: &str) -> Result<ThetaSpec> {
    match input.trim() {
        "paper" => Ok(ThetaSpec::Paper),
        "all" => Ok(ThetaSpec::All),
        "seeds" => Ok(ThetaSpec::Seeds),
        trimmed => {
            if trimmed.is_empty() {
                return Err(Error::Config("empty theta list".into()));
            }
            let mut fractions = Vec::new();
            for token in trimmed.split(',') {
                fractions.push(parse_theta_token(token)?);
            }
            Ok(ThetaSpec::Explicit(fractions))
        }
    }
}

fn parse_theta_token(token: &str) -> Result<ThetaFraction> {
    let token = token.trim();
    let bad = |msg: &str| Error::Config(format!("theta `{token}`: {msg}"));
    let (num_str, den_str) = match token.split_once('/') {
        Some(parts) => parts,
        None => (token, "1"),
    };
    let numer: i64 = num_str
        .trim()
        .parse()
        .map_err(|_| bad("numerator must be a signed integer"))?;
    let denom: u64 = den_str
        .trim()
        .parse()
        .map_err(|_| bad("denominator must be a positive integer"))?;
    if denom == 0 {
        return Err(bad("denominator must be nonzero"));
    }
    Ok(ThetaFraction { numer, denom })
}

pub fn write_csv<P: AsRef<Path>>(path: P, header: &str, rows: &[String]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{header}")?;
    for row in rows {
        writeln!(f, "{row}")?;
    }
    Ok(())
}
