use serde::{Deserialize, Serialize};

use super::{half_pixel_extent, Aux, Measurement, MeasurementKind};
use crate::error::{Error, Result};
use crate::geometry::{voxel_to_mm, Line2D, Point2, Spacing2};
use crate::imageops::Mask2D;
use crate::volume::{Class, LabelSlice};

/// Width differences below this are treated as ties.
const TIE_MM: f64 = 1e-9;

/// Extreme perpendicular offset within a bin and where along the line it sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Offset {
    pub d: f64,
    pub t: f64,
}

/// Cerebrum width across the mid-sagittal line, binned along it.
///
/// `t` grows towards superior; empty bins are skipped, so `t` is strictly
/// increasing but not necessarily evenly spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthProfile {
    pub bin_mm: f64,
    /// Bin centres along the line, in mm from the line anchor.
    pub t: Vec<f64>,
    /// `max d - min d` per bin.
    pub extent: Vec<f64>,
    /// Three-bin moving average of `extent`.
    pub smoothed: Vec<f64>,
    /// Projection of the mask centroid.
    pub t_c: f64,
    /// Unit vector along the line pointing superior.
    pub superior: Point2,
    pub min_offset: Vec<Offset>,
    pub max_offset: Vec<Offset>,
}

fn moving_average3(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(v.len() - 1);
            v[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Decomposes every mask pixel centre into position along the line and signed
/// offset across it, then bins by position.
pub fn width_profile(
    mask: &Mask2D,
    spacing: Spacing2,
    line: &Line2D,
    superior: Point2,
    bin_mm: f64,
) -> Result<WidthProfile> {
    if !(bin_mm > 0.0) {
        return Err(Error::InvalidInput(format!("bin width must be positive, got {bin_mm}")));
    }
    let dir = line.direction();
    let u = match dir.dot(superior) {
        s if s > 0.0 => dir,
        s if s < 0.0 => -dir,
        _ => return Err(Error::InvalidInput("superior direction is perpendicular to the line".into())),
    };
    let anchor = line.anchor();
    let samples: Vec<(f64, f64)> = mask
        .points()
        .into_iter()
        .map(|p| {
            let q = voxel_to_mm(p, spacing);
            ((q - anchor).dot(u), line.signed_distance(q))
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::MissingStructure("cerebrum".into()));
    }
    let n = samples.len() as f64;
    let t_c = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let t_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let bins = ((t_max - t_min) / bin_mm).floor() as usize + 1;

    let mut lo: Vec<Option<Offset>> = vec![None; bins];
    let mut hi: Vec<Option<Offset>> = vec![None; bins];
    for &(t, d) in &samples {
        let k = (((t - t_min) / bin_mm).floor() as usize).min(bins - 1);
        if lo[k].is_none_or(|o| d < o.d) {
            lo[k] = Some(Offset { d, t });
        }
        if hi[k].is_none_or(|o| d > o.d) {
            hi[k] = Some(Offset { d, t });
        }
    }

    let mut profile = WidthProfile {
        bin_mm,
        t: Vec::new(),
        extent: Vec::new(),
        smoothed: Vec::new(),
        t_c,
        superior: u,
        min_offset: Vec::new(),
        max_offset: Vec::new(),
    };
    for k in 0..bins {
        if let (Some(a), Some(b)) = (lo[k], hi[k]) {
            profile.t.push(t_min + (k as f64 + 0.5) * bin_mm);
            profile.extent.push(b.d - a.d);
            profile.min_offset.push(a);
            profile.max_offset.push(b);
        }
    }
    profile.smoothed = moving_average3(&profile.extent);
    Ok(profile)
}

/// Index of the local minimum of the smoothed profile that lies superior to
/// the mass centre and closest to it. A flat-bottomed minimum is reported at
/// its first bin.
pub fn locate_sylvian_fissure(profile: &WidthProfile) -> Result<usize> {
    let v = &profile.smoothed;
    let n = v.len();
    if n < 3 {
        return Err(Error::FissureNotFound);
    }
    let mut best: Option<usize> = None;
    let mut i = 1;
    while i + 1 < n {
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        let is_min = v[i - 1] > v[i] && j + 1 < n && v[j + 1] > v[j];
        if is_min && profile.t[i] > profile.t_c {
            let closer = best.is_none_or(|b| (profile.t[i] - profile.t_c).abs() < (profile.t[b] - profile.t_c).abs());
            if closer {
                best = Some(i);
            }
        }
        i = j + 1;
    }
    best.ok_or(Error::FissureNotFound)
}

/// Widest cerebrum section superior to the Sylvian fissure, across the line.
///
/// Endpoints sit on the outer pixel edges of the two extreme pixels. When no
/// fissure is found the widest section overall is used and noted in `aux`.
pub fn compute_cbd(
    slice: &LabelSlice,
    slice_index: usize,
    spacing: Spacing2,
    line: &Line2D,
    superior: Point2,
) -> Result<Measurement> {
    for (class, name) in [(Class::Left, "left hemisphere"), (Class::Right, "right hemisphere")] {
        if !slice.contains(class) {
            return Err(Error::MissingStructure(name.into()));
        }
    }
    let mask = slice.mask_of(&[Class::Left, Class::Right]);
    let profile = width_profile(&mask, spacing, line, superior, spacing.min())?;
    let (start, fissure_t, note) = match locate_sylvian_fissure(&profile) {
        Ok(f) => (f + 1, Some(profile.t[f]), None),
        Err(Error::FissureNotFound) => (
            0,
            None,
            Some("fissure not found; widest section used".to_string()),
        ),
        Err(e) => return Err(e),
    };
    // widths equal up to rounding keep the first bin
    let widest = (start..profile.extent.len())
        .fold(None, |best: Option<usize>, k| match best {
            Some(b) if profile.extent[k] <= profile.extent[b] + TIE_MM => Some(b),
            _ => Some(k),
        })
        .ok_or(Error::FissureNotFound)?;

    let (lo, hi) = (profile.min_offset[widest], profile.max_offset[widest]);
    let normal = line.normal();
    let foot = line.anchor() + profile.superior * (0.5 * (lo.t + hi.t));
    let pad = half_pixel_extent(normal, spacing);
    Ok(Measurement::new(
        MeasurementKind::Cbd,
        slice_index,
        foot + normal * (lo.d - pad),
        foot + normal * (hi.d + pad),
        Aux::Cbd {
            fissure_t_mm: fissure_t,
            note,
        },
    ))
}
