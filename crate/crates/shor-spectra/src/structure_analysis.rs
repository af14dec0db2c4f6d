//! The θ=0, last-column matrix elements of F⁻¹ΛH are the discrete
//! Fourier transform of the Thue-Morse sign sequence; this module builds
//! both sides of that identity and reports the growth of the column's
//! intensity peak.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::TAU;

#[derive(Debug, Clone)]
pub struct SignSequence {
    /// ±1 values, length 2^{n1}.
    pub values: Vec<i8>,
    pub rule: String,
}

/// Thue-Morse signs t_m = (−1)^{popcount(m)}.
pub fn thue_morse(n1: u32) -> Result<SignSequence> {
    if n1 > 24 {
        return Err(Error::DimensionTooLarge { dim: 1 << n1.min(32), guard: 1 << 24 });
    }
    let len = 1usize << n1;
    let values = (0..len)
        .map(|m| if m.count_ones() % 2 == 0 { 1i8 } else { -1 })
        .collect();
    Ok(SignSequence { values, rule: "(-1)^popcount(m)".to_string() })
}

/// Column l = 2^{n1}−1 of the θ=0 block via the product formula:
/// entry k = (1/2^{n1}) ∏_{m=0}^{n1−1} (1 − e^{−2πi·k·2^{m−n1}}).
pub fn tm_fourier_column(n1: u32) -> Result<Vec<Complex64>> {
    if n1 > 20 {
        return Err(Error::DimensionTooLarge { dim: 1 << n1.min(32), guard: 1 << 20 });
    }
    let dim = 1usize << n1;
    let prefactor = 1.0 / dim as f64;
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut acc = Complex64::new(prefactor, 0.0);
        for m in 0..n1 {
            let angle = -TAU * k as f64 * (1u64 << m) as f64 / dim as f64;
            acc *= Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, angle);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Growth of the column's maximum normalized intensity
/// max_k 2^{n1}·|column_k|² across n1. Reported, not asserted against
/// any scaling law.
pub fn tm_peak_scaling(n1_range: impl IntoIterator<Item = u32>) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::new();
    for n1 in n1_range {
        let col = tm_fourier_column(n1)?;
        let dim = col.len() as f64;
        let peak = col
            .iter()
            .map(|c| dim * c.norm_sqr())
            .fold(0.0f64, f64::max);
        out.push((n1, peak));
    }
    Ok(out)
}
