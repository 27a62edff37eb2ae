//! The three linear measurements on their reference slices.

mod hull;
mod skull;
mod width;

use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Spacing2};

pub use hull::{compute_tcd, convex_hull, convex_hull_diameter, min_area_rect, OrientedRect};
pub use skull::{compute_bbd, skull_candidates};
pub use width::{compute_cbd, locate_sylvian_fissure, width_profile, WidthProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MeasurementKind {
    Cbd,
    Bbd,
    Tcd,
}

impl MeasurementKind {
    pub const ALL: [MeasurementKind; 3] = [MeasurementKind::Cbd, MeasurementKind::Bbd, MeasurementKind::Tcd];

    pub fn name(self) -> &'static str {
        match self {
            MeasurementKind::Cbd => "CBD",
            MeasurementKind::Bbd => "BBD",
            MeasurementKind::Tcd => "TCD",
        }
    }
}

/// Measurement-specific extras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Aux {
    Cbd {
        /// Fissure position along the superior axis; absent when the global
        /// maximum was used instead.
        fissure_t_mm: Option<f64>,
        note: Option<String>,
    },
    Bbd {
        /// Distance from each CBD endpoint out to its skull point.
        offsets_mm: [f64; 2],
    },
    Tcd {
        hull_angle_deg: f64,
        rect_angle_deg: f64,
    },
}

/// A distance between two in-plane points, in slice millimetres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub kind: MeasurementKind,
    pub slice_index: usize,
    pub endpoint_a: Point2,
    pub endpoint_b: Point2,
    pub value_mm: f64,
    pub aux: Aux,
}

impl Measurement {
    fn new(kind: MeasurementKind, slice_index: usize, a: Point2, b: Point2, aux: Aux) -> Self {
        Self {
            kind,
            slice_index,
            endpoint_a: a,
            endpoint_b: b,
            value_mm: (a - b).norm(),
            aux,
        }
    }
}

/// Half the width of a pixel footprint measured along unit `dir`.
///
/// Distances between pixel centres fall short of the extent of the pixels
/// themselves by this much at each end.
pub fn half_pixel_extent(dir: Point2, spacing: Spacing2) -> f64 {
    0.5 * (dir.x.abs() * spacing.sx + dir.y.abs() * spacing.sy)
}
