//! Mid-sagittal line per slice and brain orientation along it.

pub mod orientation;
pub mod svm;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{voxel_to_mm, Line2D, Point2, Spacing2};
use crate::volume::{Class, LabelSlice};

pub use orientation::{propagate_orientation, slice_orientation, Orientation, OrientationSource};
pub use svm::{fit_linear_svm, SvmConfig, SvmResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MslConfig {
    pub svm: SvmConfig,
    /// Cap on hemisphere pixels fed to the SVM, per class.
    pub max_points_per_class: usize,
}

impl Default for MslConfig {
    fn default() -> Self {
        Self {
            svm: SvmConfig::default(),
            max_points_per_class: 2000,
        }
    }
}

/// Fitted line plus the optimizer result it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceMsl {
    pub line: Line2D,
    pub svm: SvmResult,
}

fn subsample(points: Vec<Point2>, cap: usize, rng: &mut ChaCha8Rng) -> Vec<Point2> {
    if points.len() <= cap {
        return points;
    }
    let mut idx = sample(rng, points.len(), cap).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| points[i]).collect()
}

/// Fits the line separating the left (-1) and right (+1) hemisphere pixels.
///
/// The right hemisphere lies on the positive side of the returned line.
pub fn msl_for_slice(slice: &LabelSlice, spacing: Spacing2, cfg: &MslConfig) -> Result<SliceMsl> {
    let to_mm = |v: Vec<Point2>| v.into_iter().map(|p| voxel_to_mm(p, spacing)).collect::<Vec<_>>();
    let left = slice.pixels_of(Class::Left);
    let right = slice.pixels_of(Class::Right);
    if left.is_empty() {
        return Err(Error::MissingStructure("left hemisphere".into()));
    }
    if right.is_empty() {
        return Err(Error::MissingStructure("right hemisphere".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.svm.seed);
    let cap = cfg.max_points_per_class.max(1);
    let left = to_mm(subsample(left, cap, &mut rng));
    let right = to_mm(subsample(right, cap, &mut rng));

    let mut labels = vec![-1i8; left.len()];
    labels.resize(left.len() + right.len(), 1);
    let mut points = left;
    points.extend(right);
    let svm = fit_linear_svm(&points, &labels, &cfg.svm)?;
    Ok(SliceMsl {
        line: svm.line()?,
        svm,
    })
}

/// Undirected angle of a line against the +x axis, in `[0, 180)`.
pub fn line_angle_deg(line: &Line2D) -> f64 {
    line.angle_deg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angle_diff_deg;

    fn unit() -> Spacing2 {
        Spacing2::new(1.0, 1.0).unwrap()
    }

    fn slice_from(width: usize, height: usize, f: impl Fn(f64, f64) -> u8) -> LabelSlice {
        let mut s = LabelSlice::new(width, height);
        for y in 0..height {
            for x in 0..width {
                s.labels[y * width + x] = f(x as f64, y as f64);
            }
        }
        s
    }

    #[test]
    fn split_columns_give_vertical_line() {
        let s = slice_from(11, 10, |x, _| match x as usize {
            0..=4 => 1,
            5 => 0,
            _ => 2,
        });
        let msl = msl_for_slice(&s, unit(), &MslConfig::default()).unwrap();
        assert!((line_angle_deg(&msl.line) - 90.0).abs() < 1.0, "{msl:?}");
        let x_at = -msl.line.c / msl.line.a;
        assert!((x_at - 5.0).abs() < 0.5, "x = {x_at}");
        assert!(msl.line.signed_distance(Point2::new(9.0, 5.0)) > 0.0);
    }

    #[test]
    fn rotation_by_thirty_degrees() {
        let theta = 30f64.to_radians();
        let (cx, cy) = (40.0, 40.0);
        // a 30 x 40 block split by its vertical centre line, then rotated
        let s = slice_from(81, 81, |x, y| {
            let (dx, dy) = (x - cx, y - cy);
            let u = dx * theta.cos() + dy * theta.sin();
            let v = -dx * theta.sin() + dy * theta.cos();
            if v.abs() > 20.0 || u.abs() > 15.0 || u.abs() < 1.0 {
                0
            } else if u < 0.0 {
                1
            } else {
                2
            }
        });
        let msl = msl_for_slice(&s, unit(), &MslConfig::default()).unwrap();
        let diff = angle_diff_deg(line_angle_deg(&msl.line), 120.0);
        assert!(diff < 1.0, "angle {}", line_angle_deg(&msl.line));
        assert!(msl.line.signed_distance(Point2::new(cx, cy)).abs() < 1.0);
    }

    #[test]
    fn overlapping_symmetric_clusters_pass_the_centroid() {
        // interleaved columns near the middle make the classes overlap
        let s = slice_from(40, 30, |x, _| {
            let xi = x as usize;
            if (17..23).contains(&xi) {
                if xi % 2 == 0 { 1 } else { 2 }
            } else if xi < 20 {
                1
            } else {
                2
            }
        });
        let msl = msl_for_slice(&s, unit(), &MslConfig::default()).unwrap();
        let x_at = -(msl.line.c + msl.line.b * 14.5) / msl.line.a;
        assert!((x_at - 19.5).abs() < 1.0, "x = {x_at}");
    }

    #[test]
    fn swapping_hemispheres_keeps_the_line() {
        let base = slice_from(30, 20, |x, y| {
            if x + 0.3 * y < 12.0 { 1 } else if x + 0.3 * y > 14.0 { 2 } else { 0 }
        });
        let swapped = LabelSlice {
            labels: base
                .labels
                .iter()
                .map(|&l| match l {
                    1 => 2,
                    2 => 1,
                    o => o,
                })
                .collect(),
            ..base.clone()
        };
        let a = msl_for_slice(&base, unit(), &MslConfig::default()).unwrap().line;
        let b = msl_for_slice(&swapped, unit(), &MslConfig::default()).unwrap().line;
        assert!(angle_diff_deg(a.angle_deg(), b.angle_deg()) < 1.0);
        let p = Point2::new(13.0, 10.0);
        assert!((a.signed_distance(p).abs() - b.signed_distance(p).abs()).abs() < 0.3);
    }

    #[test]
    fn subsampling_is_capped_and_seeded() {
        let s = slice_from(200, 60, |x, _| if x < 99.0 { 1 } else if x > 100.0 { 2 } else { 0 });
        let cfg = MslConfig {
            max_points_per_class: 500,
            ..MslConfig::default()
        };
        let a = msl_for_slice(&s, unit(), &cfg).unwrap();
        let b = msl_for_slice(&s, unit(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!((line_angle_deg(&a.line) - 90.0).abs() < 1.0);
    }

    #[test]
    fn missing_hemisphere_is_an_error() {
        let s = slice_from(10, 10, |x, _| if x < 5.0 { 1 } else { 0 });
        assert!(matches!(
            msl_for_slice(&s, unit(), &MslConfig::default()),
            Err(Error::MissingStructure(_))
        ));
    }

    #[test]
    fn angle_conventions() {
        let vertical = Line2D::from_implicit(1.0, 0.0, -3.0).unwrap();
        assert_eq!(line_angle_deg(&vertical), 90.0);
        let diag = Line2D::through(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)).unwrap();
        assert!((line_angle_deg(&diag) - 45.0).abs() < 1e-9);
        assert_eq!(line_angle_deg(&diag), line_angle_deg(&diag.negated()));
    }
}
