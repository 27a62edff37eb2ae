//! Brain bounding box and square ROI slice preparation.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::imageops::{bilinear_resize, Image2D};
use crate::volume::{Class, LabelMap, LabelSlice, RoiBox, Volume};

/// Smallest inclusive box holding every voxel of `classes`.
pub fn tight_bbox(labels: &LabelMap, classes: &[Class]) -> Result<RoiBox> {
    let dims = labels.dims();
    let mut min = [usize::MAX; 3];
    let mut max = [0usize; 3];
    let mut found = false;
    let wanted: Vec<u8> = classes.iter().map(|&c| c as u8).collect();
    for (i, l) in labels.labels().iter().enumerate() {
        if !wanted.contains(l) {
            continue;
        }
        found = true;
        let p = [i % dims.nx, (i / dims.nx) % dims.ny, i / dims.slice_len()];
        for axis in 0..3 {
            min[axis] = min[axis].min(p[axis]);
            max[axis] = max[axis].max(p[axis]);
        }
    }
    if !found {
        return Err(Error::NoForeground);
    }
    RoiBox::new(min, max, dims)
}

/// Square in-plane window used to crop every slice, in voxel units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropWindow {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

/// Normalized, square, resized ROI slices plus the mapping back to the volume.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedStack {
    pub slices: Vec<Image2D>,
    pub window: CropWindow,
    /// Side of the square output slices.
    pub out: usize,
    /// Requested window side before clamping to the volume.
    pub side: usize,
}

impl PreparedStack {
    fn scale(window: usize, out: usize) -> f64 {
        if out > 1 {
            (window - 1) as f64 / (out - 1) as f64
        } else {
            0.0
        }
    }

    /// Prepared-slice pixel -> volume pixel (x column, y row).
    pub fn to_volume(&self, p: Point2) -> Point2 {
        Point2::new(
            self.window.x0 as f64 + p.x * Self::scale(self.window.width, self.out),
            self.window.y0 as f64 + p.y * Self::scale(self.window.height, self.out),
        )
    }

    /// Volume pixel -> prepared-slice pixel.
    pub fn from_volume(&self, p: Point2) -> Point2 {
        let inv = |w: usize| {
            let s = Self::scale(w, self.out);
            if s > 0.0 {
                1.0 / s
            } else {
                0.0
            }
        };
        Point2::new(
            (p.x - self.window.x0 as f64) * inv(self.window.width),
            (p.y - self.window.y0 as f64) * inv(self.window.height),
        )
    }
}

/// Window side `round(factor * max(h, w))`, rounding halves up.
pub fn window_side(height: usize, width: usize, factor: f64) -> usize {
    (factor * height.max(width) as f64 + 0.5).floor() as usize
}

/// Places a window of `side` centred on `centre`, shifted inward so that it
/// stays inside `[0, n)`; a window larger than the axis covers the axis.
fn place(centre: f64, side: usize, n: usize) -> (usize, usize) {
    if side >= n {
        return (0, n);
    }
    let start = (centre - (side as f64 - 1.0) / 2.0 + 0.5).floor();
    let start = start.clamp(0.0, (n - side) as f64) as usize;
    (start, side)
}

/// Crops a `factor`-enlarged square around the ROI from every slice, resizes to
/// `out x out` and normalizes with the min/max of the whole stack.
pub fn prepare_slices(vol: &Volume, roi: &RoiBox, factor: f64, out: usize) -> Result<PreparedStack> {
    let dims = vol.dims();
    if roi.max[0] >= dims.nx || roi.max[1] >= dims.ny || roi.max[2] >= dims.nz {
        return Err(Error::InvalidInput(format!(
            "roi {roi:?} outside volume {dims:?}"
        )));
    }
    if out == 0 || !(factor > 0.0) {
        return Err(Error::InvalidInput("output size and factor must be positive".into()));
    }
    let side = window_side(roi.height(), roi.width(), factor);
    let cx = (roi.min[0] + roi.max[0]) as f64 / 2.0;
    let cy = (roi.min[1] + roi.max[1]) as f64 / 2.0;
    let (x0, width) = place(cx, side, dims.nx);
    let (y0, height) = place(cy, side, dims.ny);

    let mut slices: Vec<Image2D> = (0..dims.nz)
        .map(|z| {
            let crop = Image2D::from_fn(height, width, |x, y| f64::from(vol.get(x0 + x, y0 + y, z)))
                .expect("window dims are positive");
            bilinear_resize(&crop, out, out)
        })
        .collect();

    let (lo, hi) = slices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, s| {
        let (a, b) = s.range();
        (acc.0.min(a), acc.1.max(b))
    });
    for s in slices.iter_mut() {
        *s = if hi > lo {
            s.map(|v| (v - lo) / (hi - lo))
        } else {
            s.map(|_| 0.0)
        };
    }

    Ok(PreparedStack {
        slices,
        window: CropWindow {
            x0,
            y0,
            width,
            height,
        },
        out,
        side,
    })
}

/// Maps a label slice predicted on the prepared `out x out` grid back to a
/// full `width x height` volume slice: nearest-neighbour inside the crop
/// window, background outside it.
pub fn restore_labels(pred: &LabelSlice, stack: &PreparedStack, width: usize, height: usize) -> Result<LabelSlice> {
    if pred.width != stack.out || pred.height != stack.out {
        return Err(Error::DimensionMismatch(format!(
            "predicted slice {}x{}, prepared grid {}x{}",
            pred.width, pred.height, stack.out, stack.out
        )));
    }
    let w = stack.window;
    if w.x0 + w.width > width || w.y0 + w.height > height {
        return Err(Error::DimensionMismatch(format!(
            "crop window {w:?} outside a {width}x{height} slice"
        )));
    }
    let mut out = LabelSlice::new(width, height);
    let last = (stack.out - 1) as f64;
    for y in w.y0..w.y0 + w.height {
        for x in w.x0..w.x0 + w.width {
            let p = stack.from_volume(Point2::new(x as f64, y as f64));
            let px = (p.x + 0.5).floor().clamp(0.0, last) as usize;
            let py = (p.y + 0.5).floor().clamp(0.0, last) as usize;
            out.labels[x + width * y] = pred.get(px, py);
        }
    }
    Ok(out)
}
