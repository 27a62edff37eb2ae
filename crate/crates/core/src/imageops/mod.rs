//! 2D image primitives shared by the pipeline stages.

mod clahe;
mod components;
mod intensity;
mod profile;
mod resize;

pub use clahe::{clahe, ClaheParams, CLAHE_BINS};
pub use components::{keep_largest_components, keep_largest_label_components, label_components};
pub use intensity::{adjust_brightness, adjust_contrast, normalize01, LOGIT_EPS};
pub use profile::{central_difference, line_intensity_derivative, ray_profile, Profile};
pub use resize::bilinear_resize;

use crate::error::{Error, Result};

/// Row-major scalar image, `height` rows by `width` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Image2D {
    pub fn new(height: usize, width: usize, fill: f64) -> Result<Self> {
        Self::from_vec(height, width, vec![fill; height * width])
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidInput(format!(
                "image dims must be positive, got {height}x{width}"
            )));
        }
        if data.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {height}x{width} image",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::from_vec(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image2D {
        Image2D {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// (min, max) over all pixels.
    pub fn range(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Bilinear sample at pixel coordinates; `None` outside the pixel-centre hull.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        const TOL: f64 = 1e-9;
        let (wmax, hmax) = ((self.width - 1) as f64, (self.height - 1) as f64);
        if !(x >= -TOL && y >= -TOL && x <= wmax + TOL && y <= hmax + TOL) {
            return None;
        }
        let x = x.clamp(0.0, wmax);
        let y = y.clamp(0.0, hmax);
        let x0 = (x.floor() as usize).min(self.width.saturating_sub(2));
        let y0 = (y.floor() as usize).min(self.height.saturating_sub(2));
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
        let bottom = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
        Some(top * (1.0 - fy) + bottom * fy)
    }
}

/// Row-major binary mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask2D {
    height: usize,
    width: usize,
    data: Vec<bool>,
}

impl Mask2D {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: vec![false; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {height}x{width} mask",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v)
    }

    /// Pixel centres of set pixels, in voxel units, row by row.
    pub fn points(&self) -> Vec<crate::geometry::Point2> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    out.push(crate::geometry::Point2::new(x as f64, y as f64));
                }
            }
        }
        out
    }

    /// Set pixels with at least one unset (or out-of-image) 4-neighbour.
    pub fn boundary_points(&self) -> Vec<crate::geometry::Point2> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y) {
                    continue;
                }
                let edge = x == 0
                    || y == 0
                    || x + 1 == self.width
                    || y + 1 == self.height
                    || !self.get(x - 1, y)
                    || !self.get(x + 1, y)
                    || !self.get(x, y - 1)
                    || !self.get(x, y + 1);
                if edge {
                    out.push(crate::geometry::Point2::new(x as f64, y as f64));
                }
            }
        }
        out
    }
}
