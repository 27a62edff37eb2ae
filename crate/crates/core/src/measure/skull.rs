use super::{Aux, Measurement, MeasurementKind};
use crate::error::{Error, Result};
use crate::geometry::{Point2, RectMm, Spacing2};
use crate::imageops::{central_difference, ray_profile, Image2D};

/// Derivative magnitudes at or below this count as a flat profile.
const FLAT_DERIVATIVE: f64 = 1e-9;

/// Indices of derivative extrema (peaks of positive runs, troughs of
/// negative runs) whose magnitude reaches `tau_rel * max|d|`.
///
/// A flat extremum is reported at its first index; a run touching the far end
/// of the profile is not a confirmed extremum and is skipped. A profile whose
/// derivative never exceeds rounding level has no candidates.
pub fn skull_candidates(derivative: &[f64], tau_rel: f64) -> Vec<usize> {
    let d = derivative;
    let n = d.len();
    let peak = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if n < 2 || peak <= FLAT_DERIVATIVE {
        return Vec::new();
    }
    let floor = tau_rel * peak;
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[j + 1] == d[i] {
            j += 1;
        }
        let v = d[i];
        // compare in the direction of the run's sign
        let s = v.signum();
        let rises = i == 0 || s * d[i - 1] < s * v;
        let falls = j + 1 < n && s * d[j + 1] < s * v;
        if v != 0.0 && rises && falls && v.abs() >= floor {
            out.push(i);
        }
        i = j + 1;
    }
    out
}

/// Sub-sample offset of a peak from a parabola through three samples.
fn parabolic_offset(m: f64, c: f64, p: f64) -> f64 {
    let denom = m - 2.0 * c + p;
    if denom < 0.0 {
        (0.5 * (m - p) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

/// Distance from `origin` along `dir` to the inner skull edge.
fn skull_offset(
    img: &Image2D,
    spacing: Spacing2,
    origin: Point2,
    dir: Point2,
    limit: Option<&RectMm>,
    tau_rel: f64,
) -> Option<f64> {
    let step = 0.5 * spacing.min();
    let image_rect = RectMm {
        min: Point2::new(0.0, 0.0),
        max: Point2::new(
            (img.width() - 1) as f64 * spacing.sx,
            (img.height() - 1) as f64 * spacing.sy,
        ),
    };
    let bound = limit.unwrap_or(&image_rect);
    let max_len = bound.clip_line(origin, dir).map_or(0.0, |(_, hi)| hi.max(0.0));
    let profile = ray_profile(img, spacing, origin, dir, step, max_len);
    let d = central_difference(&profile.values, step);
    // the two qualifying extrema closest to the brain edge; the stronger wins
    let mut qualifying = skull_candidates(&d, tau_rel).into_iter();
    let first = qualifying.next()?;
    let pick = match qualifying.next() {
        Some(second) if d[second].abs() > d[first].abs() => second,
        _ => first,
    };
    let shift = if pick > 0 && pick + 1 < d.len() {
        parabolic_offset(d[pick - 1].abs(), d[pick].abs(), d[pick + 1].abs())
    } else {
        0.0
    };
    Some(profile.positions[pick] + shift * step)
}

/// Extends the CBD segment outwards on both sides to the inner skull edge.
///
/// Each ray runs from a CBD endpoint to `limit` (or the image edge). The
/// skull point is the stronger of the two intensity-derivative extrema
/// closest to the endpoint, among those reaching `tau_rel` of the ray's
/// strongest derivative.
pub fn compute_bbd(
    img: &Image2D,
    spacing: Spacing2,
    cbd: &Measurement,
    limit: Option<&RectMm>,
    tau_rel: f64,
) -> Result<Measurement> {
    if !(tau_rel > 0.0 && tau_rel <= 1.0) {
        return Err(Error::InvalidInput(format!("tau_rel must be in (0, 1], got {tau_rel}")));
    }
    let (a, b) = (cbd.endpoint_a, cbd.endpoint_b);
    if (b - a).norm() == 0.0 {
        return Err(Error::Degenerate("CBD endpoints coincide".into()));
    }
    let out_a = (a - b).normalized();
    let side = |origin: Point2, dir: Point2, name: &str| {
        skull_offset(img, spacing, origin, dir, limit, tau_rel)
            .ok_or_else(|| Error::SkullNotFound(name.to_string()))
    };
    let off_a = side(a, out_a, "endpoint a side")?;
    let off_b = side(b, -out_a, "endpoint b side")?;
    Ok(Measurement::new(
        MeasurementKind::Bbd,
        cbd.slice_index,
        a + out_a * off_a,
        b - out_a * off_b,
        Aux::Bbd {
            offsets_mm: [off_a, off_b],
        },
    ))
}
