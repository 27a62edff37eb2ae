//! Synthetic fetal-head volumes with analytic ground truth.
//!
//! The head is built in a frame aligned with the mid-sagittal plane: `s`
//! runs along the line towards superior, `l` runs across it and `dz` is the
//! through-slice offset from the hemisphere centre. The cerebrum is an
//! ellipsoid whose inferior half is longer than its superior half, so its
//! mass centre sits below the widest section; a shallow width notch just
//! below the widest section stands in for the Sylvian fissure.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Line2D, Point2};
use crate::slice_select::{FixedProbabilities, PhantomProfile, SliceProbabilities, Task};
use crate::volume::{Class, Dims, LabelMap, Spacing3, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Intensities {
    pub background: f64,
    pub parenchyma: f64,
    pub csf: f64,
    pub skull: f64,
    pub cerebellum: f64,
}

impl Default for Intensities {
    fn default() -> Self {
        Self {
            background: 0.05,
            parenchyma: 0.45,
            csf: 0.90,
            skull: 0.12,
            cerebellum: 0.50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomSpec {
    pub dims: Dims,
    pub spacing_mm: Spacing3,
    /// Rotation of the mid-sagittal line away from vertical.
    pub msl_angle_deg: f64,
    /// Cerebrum semi-axis along the line, superior half.
    pub a_mm: f64,
    /// Cerebrum semi-axis along the line, inferior half.
    pub inferior_a_mm: f64,
    /// Cerebrum semi-axis across the line.
    pub b_mm: f64,
    /// Cerebrum semi-axis through the slices.
    pub c_mm: f64,
    pub gap_mm: f64,
    /// Distance of the notch below the widest section.
    pub fissure_offset_mm: f64,
    /// Width lost on each side at the bottom of the notch.
    pub fissure_depth_mm: f64,
    /// Half-height of the notch along the line.
    pub fissure_half_width_mm: f64,
    pub csf_gap_mm: f64,
    pub skull_thickness_mm: f64,
    /// In-plane shift of the head centre from the image centre.
    pub center_offset_mm: [f64; 2],
    /// Slice through the cerebrum centre.
    pub cbd_slice: usize,
    /// Slice through the cerebellum centre.
    pub tcd_slice: usize,
    /// Distance of the cerebellum centre below the cerebrum centre.
    pub cerebellum_offset_mm: f64,
    /// Cerebellum semi-axes: across the line, along it, through the slices.
    pub cerebellum_semi_axes_mm: [f64; 3],
    pub intensities: Intensities,
    pub noise_sigma: f64,
    /// Uniform noise on the slice probabilities.
    pub prob_noise: f64,
    /// Peak value of the noiseless slice probabilities.
    pub prob_peak_scale: f64,
    pub prob_half_width: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            dims: Dims {
                nx: 160,
                ny: 160,
                nz: 24,
            },
            spacing_mm: Spacing3 {
                sx: 0.75,
                sy: 0.75,
                sz: 4.0,
            },
            msl_angle_deg: 0.0,
            a_mm: 36.0,
            inferior_a_mm: 48.0,
            b_mm: 40.0,
            c_mm: 45.0,
            gap_mm: 2.0,
            fissure_offset_mm: 2.5,
            fissure_depth_mm: 3.0,
            fissure_half_width_mm: 3.0,
            csf_gap_mm: 4.0,
            skull_thickness_mm: 3.0,
            center_offset_mm: [0.0, 0.0],
            cbd_slice: 12,
            tcd_slice: 8,
            cerebellum_offset_mm: 26.4,
            cerebellum_semi_axes_mm: [18.0, 7.2, 8.0],
            intensities: Intensities::default(),
            noise_sigma: 0.01,
            prob_noise: 0.0,
            prob_peak_scale: 1.0,
            prob_half_width: 3.0,
            seed: 0,
        }
    }
}

impl PhantomSpec {
    /// Default head rescaled to cerebrum half-width `b_mm`, keeping the
    /// shape proportions and the cerebellum placement.
    pub fn with_half_width(b_mm: f64) -> Self {
        let d = Self::default();
        let k = b_mm / d.b_mm;
        Self {
            a_mm: d.a_mm * k,
            inferior_a_mm: d.inferior_a_mm * k,
            b_mm,
            cerebellum_offset_mm: d.cerebellum_offset_mm * k,
            cerebellum_semi_axes_mm: [
                d.cerebellum_semi_axes_mm[0] * k,
                d.cerebellum_semi_axes_mm[1] * k,
                d.cerebellum_semi_axes_mm[2],
            ],
            ..d
        }
    }

    fn superior_dir(&self) -> Point2 {
        Point2::new(0.0, -1.0).rotated(self.msl_angle_deg.to_radians())
    }

    fn lateral_dir(&self) -> Point2 {
        let u = self.superior_dir();
        Point2::new(-u.y, u.x)
    }

    fn center_mm(&self) -> Point2 {
        let sp = self.spacing_mm;
        Point2::new(
            0.5 * (self.dims.nx - 1) as f64 * sp.sx + self.center_offset_mm[0],
            0.5 * (self.dims.ny - 1) as f64 * sp.sy + self.center_offset_mm[1],
        )
    }

    /// Outer skull semi-axes: superior, inferior, across.
    fn outer_axes(&self) -> [f64; 3] {
        let pad = self.csf_gap_mm + self.skull_thickness_mm;
        [self.a_mm + pad, self.inferior_a_mm + pad, self.b_mm + pad]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(format!("phantom spec: {msg}")));
        Spacing3::new(self.spacing_mm.sx, self.spacing_mm.sy, self.spacing_mm.sz)?;
        Dims::new(self.dims.nx, self.dims.ny, self.dims.nz)?;
        let positive = [
            ("a_mm", self.a_mm),
            ("inferior_a_mm", self.inferior_a_mm),
            ("b_mm", self.b_mm),
            ("c_mm", self.c_mm),
            ("fissure_offset_mm", self.fissure_offset_mm),
            ("fissure_half_width_mm", self.fissure_half_width_mm),
            ("csf_gap_mm", self.csf_gap_mm),
            ("skull_thickness_mm", self.skull_thickness_mm),
            ("prob_half_width", self.prob_half_width),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return bad(format!("{name} must be positive, got {v}"));
        }
        if self.gap_mm < 0.0 || self.fissure_depth_mm < 0.0 || self.noise_sigma < 0.0 || self.prob_noise < 0.0 {
            return bad("gap, fissure depth and noise levels must be non-negative".into());
        }
        if self.cerebellum_semi_axes_mm.iter().any(|v| !(*v > 0.0)) {
            return bad("cerebellum semi-axes must be positive".into());
        }
        if self.cbd_slice >= self.dims.nz || self.tcd_slice >= self.dims.nz {
            return bad(format!(
                "reference slices ({}, {}) outside 0..{}",
                self.cbd_slice, self.tcd_slice, self.dims.nz
            ));
        }
        if self.fissure_offset_mm + self.fissure_half_width_mm >= self.inferior_a_mm {
            return bad("fissure notch does not fit in the cerebrum".into());
        }
        if 2.0 * self.fissure_depth_mm + self.gap_mm >= 2.0 * self.b_mm {
            return bad("fissure notch is deeper than the cerebrum".into());
        }
        if !(self.cerebellum_offset_mm > 0.0) {
            return bad("cerebellum must lie inferior to the cerebrum centre".into());
        }
        if !(0.0..=1.0).contains(&self.prob_peak_scale) {
            return bad("prob_peak_scale must be in [0, 1]".into());
        }

        // outer skull inside the image
        let sp = self.spacing_mm;
        let (u, v, c) = (self.superior_dir(), self.lateral_dir(), self.center_mm());
        let [sup, inf, lat] = self.outer_axes();
        let margin = sp.sx.max(sp.sy);
        let max_x = (self.dims.nx - 1) as f64 * sp.sx - margin;
        let max_y = (self.dims.ny - 1) as f64 * sp.sy - margin;
        for k in 0..720 {
            let phi = k as f64 * std::f64::consts::PI / 360.0;
            let s = phi.sin() * if phi.sin() >= 0.0 { sup } else { inf };
            let p = c + u * s + v * (phi.cos() * lat);
            if p.x < margin || p.y < margin || p.x > max_x || p.y > max_y {
                return bad(format!("head does not fit inside the {}x{} image", self.dims.nx, self.dims.ny));
            }
        }

        // cerebellum inside the cerebrum at its own central slice
        let dz = (self.tcd_slice as f64 - self.cbd_slice as f64) * sp.sz;
        let [ca, cb, _] = self.cerebellum_semi_axes_mm;
        for k in 0..360 {
            let phi = k as f64 * std::f64::consts::PI / 180.0;
            let s = -self.cerebellum_offset_mm + cb * phi.sin();
            let l = ca * phi.cos();
            if self.cerebrum_level(s, l, dz) >= 1.0 {
                return bad("cerebellum extends outside the cerebrum".into());
            }
        }
        Ok(())
    }

    /// Normalized ellipsoid radius of the cerebrum (1 on its surface), with
    /// every semi-axis grown by `grow`.
    fn level(&self, s: f64, l: f64, dz: f64, grow: f64) -> f64 {
        let a = if s >= 0.0 { self.a_mm } else { self.inferior_a_mm } + grow;
        (s / a).powi(2) + (l / (self.b_mm + grow)).powi(2) + (dz / (self.c_mm + grow)).powi(2)
    }

    fn cerebrum_level(&self, s: f64, l: f64, dz: f64) -> f64 {
        self.level(s, l, dz, 0.0)
    }

    fn notch(&self, s: f64) -> f64 {
        let r = (s + self.fissure_offset_mm) / self.fissure_half_width_mm;
        self.fissure_depth_mm * (1.0 - r * r).max(0.0)
    }

    /// Class and noiseless intensity at in-plane offset `(s, l)` from the
    /// centre on a slice `dz` mm from the cerebrum centre.
    fn tissue(&self, s: f64, l: f64, dz: f64, dz_cerebellum: f64) -> (Class, f64) {
        let it = &self.intensities;
        let [ca, cb, cc] = self.cerebellum_semi_axes_mm;
        let cere = (l / ca).powi(2) + ((s + self.cerebellum_offset_mm) / cb).powi(2) + (dz_cerebellum / cc).powi(2);
        if cere <= 1.0 {
            return (Class::Cerebellum, it.cerebellum);
        }
        let inside = self.cerebrum_level(s, l, dz);
        if inside <= 1.0 {
            // half-width of the cerebrum at this height, minus the notch
            let a = if s >= 0.0 { self.a_mm } else { self.inferior_a_mm };
            let half = self.b_mm * (1.0 - (s / a).powi(2) - (dz / self.c_mm).powi(2)).max(0.0).sqrt();
            let al = l.abs();
            if al >= 0.5 * self.gap_mm && al <= half - self.notch(s) {
                let class = if l < 0.0 { Class::Left } else { Class::Right };
                return (class, it.parenchyma);
            }
            return (Class::Background, it.csf);
        }
        if self.level(s, l, dz, self.csf_gap_mm) <= 1.0 {
            return (Class::Background, it.csf);
        }
        if self.level(s, l, dz, self.csf_gap_mm + self.skull_thickness_mm) <= 1.0 {
            return (Class::Background, it.skull);
        }
        (Class::Background, it.background)
    }
}

/// Ground truth of a generated phantom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomTruth {
    pub cbd_mm: f64,
    pub bbd_mm: f64,
    pub tcd_mm: f64,
    pub cbd_slice: usize,
    pub tcd_slice: usize,
    /// Mid-sagittal line of every slice.
    pub msl: Vec<Line2D>,
    pub msl_angle_deg: f64,
    /// Unit vector along the line pointing superior.
    pub superior_dir: Point2,
    pub center_mm: Point2,
}

#[derive(Debug, Clone)]
pub struct Phantom {
    pub volume: Volume,
    pub labels: LabelMap,
    pub truth: PhantomTruth,
    pub probabilities: FixedProbabilities,
}

/// Rasterizes `spec` at voxel centres. Same spec, same bits.
pub fn generate(spec: &PhantomSpec) -> Result<Phantom> {
    spec.validate()?;
    let dims = spec.dims;
    let sp = spec.spacing_mm;
    let (u, v, centre) = (spec.superior_dir(), spec.lateral_dir(), spec.center_mm());
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut voxels = Vec::with_capacity(dims.len());
    let mut labels = Vec::with_capacity(dims.len());
    for z in 0..dims.nz {
        let dz = (z as f64 - spec.cbd_slice as f64) * sp.sz;
        let dz_cb = (z as f64 - spec.tcd_slice as f64) * sp.sz;
        for y in 0..dims.ny {
            for x in 0..dims.nx {
                let p = Point2::new(x as f64 * sp.sx, y as f64 * sp.sy) - centre;
                let (class, value) = spec.tissue(p.dot(u), p.dot(v), dz, dz_cb);
                let jitter = if spec.noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                voxels.push((value + jitter).clamp(0.0, 1.0) as f32);
                labels.push(class as u8);
            }
        }
    }

    let line = Line2D::through(centre, u)?;
    let [ca, cb, _] = spec.cerebellum_semi_axes_mm;
    let truth = PhantomTruth {
        cbd_mm: 2.0 * spec.b_mm,
        bbd_mm: 2.0 * (spec.b_mm + spec.csf_gap_mm),
        tcd_mm: 2.0 * ca.max(cb),
        cbd_slice: spec.cbd_slice,
        tcd_slice: spec.tcd_slice,
        msl: vec![line; dims.nz],
        msl_angle_deg: line.angle_deg(),
        superior_dir: u,
        center_mm: centre,
    };

    let profile = |task: Task, peak: usize, salt: u64| {
        let prof = PhantomProfile {
            peak,
            half_width: spec.prob_half_width,
            noise: spec.prob_noise,
            peak_scale: spec.prob_peak_scale,
            seed: spec.seed ^ salt,
        };
        SliceProbabilities::new(task, prof.values(dims.nz))
    };
    let probabilities = FixedProbabilities {
        cbd_bbd: profile(Task::CbdBbd, spec.cbd_slice, 0x5c0f_cbd0)?,
        tcd: profile(Task::Tcd, spec.tcd_slice, 0x5c0f_7cd0)?,
    };

    Ok(Phantom {
        volume: Volume::new(dims, sp, voxels)?,
        labels: LabelMap::new(dims, sp, labels)?,
        truth,
        probabilities,
    })
}
