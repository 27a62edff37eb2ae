//! Agreement statistics between measurement sets, slice selections, line
//! angles and segmentations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::angle_diff_deg;
use crate::imageops::Mask2D;

/// Bland-Altman summary of paired differences `first - second`.
///
/// `ci95` uses the population (1/n) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementStats {
    pub bias: f64,
    pub ci95: f64,
    pub mean_abs_diff: f64,
    pub n: usize,
}

pub fn diff(l1: f64, l2: f64) -> f64 {
    (l1 - l2).abs()
}

/// `1 - |s1 - s2| / n_slices`.
pub fn slice_selection_accuracy(s1: usize, s2: usize, n_slices: usize) -> Result<f64> {
    if n_slices == 0 {
        return Err(Error::InvalidInput("slice count must be at least 1".into()));
    }
    Ok(1.0 - s1.abs_diff(s2) as f64 / n_slices as f64)
}

/// Undirected angle difference in [0, 90].
pub fn msl_angle_diff(a1_deg: f64, a2_deg: f64) -> f64 {
    angle_diff_deg(a1_deg, a2_deg)
}

pub fn bland_altman(first: &[f64], second: &[f64]) -> Result<AgreementStats> {
    if first.len() != second.len() {
        return Err(Error::LengthMismatch(first.len(), second.len()));
    }
    let n = first.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "agreement statistics need at least 2 pairs, got {n}"
        )));
    }
    let d: Vec<f64> = first.iter().zip(second).map(|(a, b)| a - b).collect();
    let nf = n as f64;
    let bias = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|v| (v - bias).powi(2)).sum::<f64>() / nf;
    Ok(AgreementStats {
        bias,
        ci95: 1.96 * var.sqrt(),
        mean_abs_diff: d.iter().map(|v| v.abs()).sum::<f64>() / nf,
        n,
    })
}

/// `2|A ∩ B| / (|A| + |B|)`, with two empty masks scoring 1.
pub fn dice(a: &Mask2D, b: &Mask2D) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let total = a.count() + b.count();
    if total == 0 {
        return Ok(1.0);
    }
    let both = a.data().iter().zip(b.data()).filter(|(x, y)| **x && **y).count();
    Ok(2.0 * both as f64 / total as f64)
}
