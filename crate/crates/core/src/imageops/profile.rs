use super::Image2D;
use crate::error::{Error, Result};
use crate::geometry::{mm_to_voxel, Point2, Spacing2};

/// Samples along a ray: distance from the ray origin in mm and the value there.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Central differences with one-sided differences at both ends.
pub fn central_difference(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    (values[1] - values[0]) / step
                } else if i == n - 1 {
                    (values[n - 1] - values[n - 2]) / step
                } else {
                    (values[i + 1] - values[i - 1]) / (2.0 * step)
                }
            })
            .collect(),
    }
}

/// Intensity profile from `p0` to `p1` (mm) and its derivative per mm.
///
/// Samples are `step_mm` apart starting at `p0`; the last one is the furthest
/// grid point not beyond `p1`. Every sample must fall inside the image.
pub fn line_intensity_derivative(
    img: &Image2D,
    spacing: Spacing2,
    p0: Point2,
    p1: Point2,
    step_mm: f64,
) -> Result<(Profile, Profile)> {
    if !(step_mm > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step_mm}")));
    }
    let length = (p1 - p0).norm();
    let count = (length / step_mm + 1e-9).floor() as usize + 1;
    let dir = if length > 0.0 {
        (p1 - p0) * (1.0 / length)
    } else {
        Point2::default()
    };
    let mut positions = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        let s = i as f64 * step_mm;
        let v = mm_to_voxel(p0 + dir * s, spacing);
        let value = img.sample(v.x, v.y).ok_or(Error::RayOutOfBounds)?;
        positions.push(s);
        values.push(value);
    }
    let derivative = central_difference(&values, step_mm);
    Ok((
        Profile {
            positions: positions.clone(),
            values,
        },
        Profile {
            positions,
            values: derivative,
        },
    ))
}

/// Samples from `origin` along unit `dir` until `max_len` or the image edge.
pub fn ray_profile(
    img: &Image2D,
    spacing: Spacing2,
    origin: Point2,
    dir: Point2,
    step_mm: f64,
    max_len: f64,
) -> Profile {
    let mut positions = Vec::new();
    let mut values = Vec::new();
    let mut i = 0usize;
    loop {
        let s = i as f64 * step_mm;
        if s > max_len + 1e-9 {
            break;
        }
        let v = mm_to_voxel(origin + dir * s, spacing);
        match img.sample(v.x, v.y) {
            Some(value) => {
                positions.push(s);
                values.push(value);
            }
            None => break,
        }
        i += 1;
    }
    Profile { positions, values }
}
