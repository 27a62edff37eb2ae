//! Volumes, label maps and voxel boxes.
//!
//! Voxels are stored x-fastest, z-slowest. The slice axis is z (the coronal
//! stack), so a slice is a contiguous `ny x nx` block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, RectMm, Spacing2};
use crate::imageops::{Image2D, Mask2D};

/// Segmentation classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Class {
    Background = 0,
    Left = 1,
    Right = 2,
    Cerebellum = 3,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::Background, Class::Left, Class::Right, Class::Cerebellum];
    pub const BRAIN: [Class; 3] = [Class::Left, Class::Right, Class::Cerebellum];

    pub fn from_u8(v: u8) -> Option<Class> {
        Class::ALL.get(v as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::Background => "background",
            Class::Left => "left_hemisphere",
            Class::Right => "right_hemisphere",
            Class::Cerebellum => "cerebellum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidInput(format!(
                "dimensions must be positive, got ({nx}, {ny}, {nz})"
            )));
        }
        Ok(Self { nx, ny, nz })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice_len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.nx * (y + self.ny * z)
    }
}

/// Voxel spacing in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spacing3 {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl Spacing3 {
    pub fn new(sx: f64, sy: f64, sz: f64) -> Result<Self> {
        if ![sx, sy, sz].iter().all(|s| *s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "spacing must be positive, got ({sx}, {sy}, {sz})"
            )));
        }
        Ok(Self { sx, sy, sz })
    }

    pub fn in_plane(&self) -> Spacing2 {
        Spacing2 {
            sx: self.sx,
            sy: self.sy,
        }
    }
}

/// Scalar scan in original intensity units.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    dims: Dims,
    spacing: Spacing3,
    voxels: Vec<f32>,
}

impl Volume {
    pub fn new(dims: Dims, spacing: Spacing3, voxels: Vec<f32>) -> Result<Self> {
        if voxels.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "volume has {} voxels, dims {:?} require {}",
                voxels.len(),
                dims,
                dims.len()
            )));
        }
        Ok(Self {
            dims,
            spacing,
            voxels,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing3 {
        self.spacing
    }

    pub fn voxels(&self) -> &[f32] {
        &self.voxels
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f32 {
        self.voxels[self.dims.index(x, y, z)]
    }

    pub fn slice(&self, z: usize) -> Image2D {
        let n = self.dims.slice_len();
        let data = self.voxels[z * n..(z + 1) * n]
            .iter()
            .map(|&v| f64::from(v))
            .collect();
        Image2D::from_vec(self.dims.ny, self.dims.nx, data).expect("slice dims are positive")
    }
}

/// Per-voxel class labels aligned to a [`Volume`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap {
    dims: Dims,
    spacing: Spacing3,
    labels: Vec<u8>,
}

impl LabelMap {
    pub fn new(dims: Dims, spacing: Spacing3, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "label map has {} voxels, dims {:?} require {}",
                labels.len(),
                dims,
                dims.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| Class::from_u8(l).is_none()) {
            return Err(Error::InvalidInput(format!(
                "label value {bad} outside {{0,1,2,3}}"
            )));
        }
        Ok(Self {
            dims,
            spacing,
            labels,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing3 {
        self.spacing
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> Class {
        Class::from_u8(self.labels[self.dims.index(x, y, z)]).expect("validated label")
    }

    pub fn slice(&self, z: usize) -> LabelSlice {
        let n = self.dims.slice_len();
        LabelSlice {
            width: self.dims.nx,
            height: self.dims.ny,
            labels: self.labels[z * n..(z + 1) * n].to_vec(),
        }
    }

    pub fn set_slice(&mut self, z: usize, slice: &LabelSlice) {
        let n = self.dims.slice_len();
        assert_eq!(slice.labels.len(), n, "slice size");
        self.labels[z * n..(z + 1) * n].copy_from_slice(&slice.labels);
    }

    /// Fails unless the label map is aligned with `vol`.
    pub fn check_aligned(&self, vol: &Volume) -> Result<()> {
        if self.dims != vol.dims() {
            return Err(Error::DimensionMismatch(format!(
                "labels {:?} vs volume {:?}",
                self.dims,
                vol.dims()
            )));
        }
        let (a, b) = (self.spacing, vol.spacing());
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-6 * x.abs().max(y.abs());
        if !(close(a.sx, b.sx) && close(a.sy, b.sy) && close(a.sz, b.sz)) {
            return Err(Error::DimensionMismatch(format!(
                "labels spacing {a:?} vs volume spacing {b:?}"
            )));
        }
        Ok(())
    }
}

/// One slice of a [`LabelMap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSlice {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u8>,
}

impl LabelSlice {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            labels: vec![0; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, class: Class) {
        self.labels[y * self.width + x] = class as u8;
    }

    pub fn count(&self, class: Class) -> usize {
        self.labels.iter().filter(|&&l| l == class as u8).count()
    }

    pub fn contains(&self, class: Class) -> bool {
        self.labels.contains(&(class as u8))
    }

    pub fn mask_of(&self, classes: &[Class]) -> Mask2D {
        let data = self
            .labels
            .iter()
            .map(|l| classes.iter().any(|c| *c as u8 == *l))
            .collect();
        Mask2D::from_vec(self.height, self.width, data).expect("slice dims are positive")
    }

    /// Pixel centres (voxel units) of the given class.
    pub fn pixels_of(&self, class: Class) -> Vec<Point2> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) == class as u8 {
                    out.push(Point2::new(x as f64, y as f64));
                }
            }
        }
        out
    }
}

/// Inclusive voxel box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiBox {
    pub min: [usize; 3],
    pub max: [usize; 3],
}

impl RoiBox {
    pub fn new(min: [usize; 3], max: [usize; 3], dims: Dims) -> Result<Self> {
        let limits = [dims.nx, dims.ny, dims.nz];
        for axis in 0..3 {
            if min[axis] > max[axis] || max[axis] >= limits[axis] {
                return Err(Error::InvalidInput(format!(
                    "box {min:?}..{max:?} invalid for dims {dims:?}"
                )));
            }
        }
        Ok(Self { min, max })
    }

    /// In-plane height (rows).
    pub fn height(&self) -> usize {
        self.max[1] - self.min[1] + 1
    }

    /// In-plane width (columns).
    pub fn width(&self) -> usize {
        self.max[0] - self.min[0] + 1
    }

    /// In-plane footprint in millimetres, covering whole pixels.
    pub fn in_plane_rect_mm(&self, spacing: Spacing2) -> RectMm {
        RectMm {
            min: Point2::new(
                (self.min[0] as f64 - 0.5) * spacing.sx,
                (self.min[1] as f64 - 0.5) * spacing.sy,
            ),
            max: Point2::new(
                (self.max[0] as f64 + 0.5) * spacing.sx,
                (self.max[1] as f64 + 0.5) * spacing.sy,
            ),
        }
    }
}
